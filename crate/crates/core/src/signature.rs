//! Signatures of piecewise-linear paths.
//!
//! A linear segment with increment `delta` has signature `exp(delta)`; the
//! signature of a concatenation is the tensor product of the pieces
//! (Chen's identity). Products are evaluated left to right, and the tensor
//! product itself uses compensated accumulation, so a fixed input yields a
//! bit-stable result.

use std::io::{Read, Write};

use crate::tensor::{GroupElement, TruncatedTensor};
use crate::{Error, Result};

/// A finite sequence of timestamped vertices in `R^d`, interpreted
/// piecewise-linearly, constant after the final vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePath {
    dim: usize,
    times: Vec<f64>,
    points: Vec<Vec<f64>>,
}

impl PiecewisePath {
    /// Build from parallel vertex arrays. Times must start at 0, increase
    /// strictly and stay within `[0, 1]`.
    pub fn new(times: Vec<f64>, points: Vec<Vec<f64>>) -> Result<Self> {
        if times.is_empty() || times.len() != points.len() {
            return Err(Error::InvalidPath(format!(
                "need matching nonempty vertex arrays, got {} times and {} points",
                times.len(),
                points.len()
            )));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidPath(format!(
                "first vertex time must be 0, got {}",
                times[0]
            )));
        }
        let last = *times.last().unwrap();
        if !(0.0..=1.0).contains(&last) {
            return Err(Error::InvalidPath(format!(
                "vertex times must lie in [0, 1], got {last}"
            )));
        }
        for w in times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidPath(format!(
                    "vertex times must increase strictly: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        let dim = points[0].len();
        if dim == 0 || points.iter().any(|p| p.len() != dim) {
            return Err(Error::InvalidPath(
                "all vertices must share one positive dimension".into(),
            ));
        }
        Ok(PiecewisePath { dim, times, points })
    }

    /// A path with equally spaced vertex times on `[0, 1]`.
    pub fn from_points(points: Vec<Vec<f64>>) -> Result<Self> {
        let n = points.len();
        if n < 2 {
            return Err(Error::InvalidPath("need at least two vertices".into()));
        }
        let times = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        Self::new(times, points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn num_vertices(&self) -> usize {
        self.times.len()
    }

    /// Piecewise-linear evaluation; constant before the first and after the
    /// last vertex.
    pub fn position(&self, t: f64) -> Vec<f64> {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.points[0].clone();
        }
        if t >= self.times[n - 1] {
            return self.points[n - 1].clone();
        }
        let seg = match self
            .times
            .binary_search_by(|x| x.partial_cmp(&t).unwrap())
        {
            Ok(i) => return self.points[i].clone(),
            Err(i) => i - 1,
        };
        let (t0, t1) = (self.times[seg], self.times[seg + 1]);
        let w = (t - t0) / (t1 - t0);
        self.points[seg]
            .iter()
            .zip(&self.points[seg + 1])
            .map(|(a, b)| a + w * (b - a))
            .collect()
    }

    /// Euclidean arc length of the portion inside `[s, t]`. Additive:
    /// `length(s, u) = length(s, t) + length(t, u)`.
    pub fn length(&self, s: f64, t: f64) -> Result<f64> {
        if s > t {
            return Err(Error::BadInterval { s, t });
        }
        let mut total = 0.0;
        for i in 0..self.times.len().saturating_sub(1) {
            let (a, b) = (self.times[i], self.times[i + 1]);
            let lo = a.max(s);
            let hi = b.min(t);
            if hi <= lo {
                continue;
            }
            let seg: f64 = self.points[i]
                .iter()
                .zip(&self.points[i + 1])
                .map(|(p, q)| (q - p) * (q - p))
                .sum::<f64>()
                .sqrt();
            total += seg * (hi - lo) / (b - a);
        }
        Ok(total)
    }

    /// Traverse backwards: the signature of the result is the group inverse.
    pub fn reversed(&self) -> Self {
        let first = self.times[0];
        let last = *self.times.last().unwrap();
        let times = self.times.iter().rev().map(|&t| first + last - t).collect();
        let points = self.points.iter().rev().cloned().collect();
        PiecewisePath {
            dim: self.dim,
            times,
            points,
        }
    }

    /// Read the CSV vertex format: header `t,x1,...,xd`, one vertex per row.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(reader);
        let headers = rd
            .headers()
            .map_err(|e| Error::Parse(e.to_string()))?
            .clone();
        if headers.len() < 2 || headers.get(0) != Some("t") {
            return Err(Error::Parse(
                "expected CSV header `t,x1,...,xd`".into(),
            ));
        }
        let mut times = Vec::new();
        let mut points = Vec::new();
        for record in rd.records() {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            let mut fields = record.iter().map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad float {f:?}: {e}")))
            });
            let t = fields.next().ok_or_else(|| Error::Parse("empty row".into()))??;
            let point: Vec<f64> = fields.collect::<Result<_>>()?;
            times.push(t);
            points.push(point);
        }
        Self::new(times, points)
    }

    /// Write the CSV vertex format with round-trip-exact decimals.
    pub fn to_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(writer);
        let mut header = vec!["t".to_string()];
        for i in 1..=self.dim {
            header.push(format!("x{i}"));
        }
        wr.write_record(&header).map_err(|e| Error::Parse(e.to_string()))?;
        for (t, p) in self.times.iter().zip(&self.points) {
            let mut row = vec![format_f64(*t)];
            row.extend(p.iter().map(|x| format_f64(*x)));
            wr.write_record(&row).map_err(|e| Error::Parse(e.to_string()))?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Shortest decimal that parses back to the same bits.
pub fn format_f64(x: f64) -> String {
    let mut s = format!("{x}");
    if s.parse::<f64>().map(f64::to_bits) != Ok(x.to_bits()) {
        s = format!("{x:.17e}");
    }
    s
}

/// Signature of one linear segment: `exp` of the increment at level 1.
pub fn segment_signature(delta: &[f64], m: usize) -> Result<GroupElement> {
    let t = TruncatedTensor::from_vector(m, delta)?;
    Ok(GroupElement::trusted(t.exp()?))
}

/// Signature of `x` over `[s, t]` in `G^m(R^d)`: the ordered product of
/// segment exponentials. Query times inside a segment split it exactly.
pub fn path_signature(x: &PiecewisePath, s: f64, t: f64, m: usize) -> Result<GroupElement> {
    if s > t || s < 0.0 {
        return Err(Error::BadInterval { s, t });
    }
    let acc = path_signature_tensor(x, s, t, m)?;
    Ok(GroupElement::trusted(acc))
}

pub(crate) fn path_signature_tensor(
    x: &PiecewisePath,
    s: f64,
    t: f64,
    m: usize,
) -> Result<TruncatedTensor> {
    let d = x.dim();
    let mut acc = TruncatedTensor::one(d, m);
    let times = x.times();
    let points = x.points();
    for i in 0..times.len().saturating_sub(1) {
        let (a, b) = (times[i], times[i + 1]);
        let lo = a.max(s);
        let hi = b.min(t);
        if hi <= lo {
            continue;
        }
        let frac = (hi - lo) / (b - a);
        let delta: Vec<f64> = points[i]
            .iter()
            .zip(&points[i + 1])
            .map(|(p, q)| (q - p) * frac)
            .collect();
        let seg = TruncatedTensor::from_vector(m, &delta)?.exp()?;
        acc = acc.mul(&seg)?;
    }
    Ok(acc)
}
