//! Dominance filtering and hypervolume (minimization convention).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::qubo::{BinaryVector, MultiObjectiveSet};
use crate::rng;

pub const MAX_EXACT_DIM: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectiveVector(pub Vec<f64>);

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<f64>> for ObjectiveVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub bits: BinaryVector,
    pub objectives: ObjectiveVector,
}

impl SolutionRecord {
    /// Evaluates `bits` under every objective of `set`.
    pub fn evaluate(set: &MultiObjectiveSet, bits: BinaryVector) -> Result<Self> {
        let objectives = ObjectiveVector(set.evaluate(&bits)?);
        Ok(Self { bits, objectives })
    }
}

/// Mutually non-dominated records.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FrontSet {
    pub records: Vec<SolutionRecord>,
}

impl FrontSet {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.records.iter().map(|r| r.objectives.values())
    }

    /// Front built directly from objective vectors (bits left empty).
    pub fn from_points(points: impl IntoIterator<Item = Vec<f64>>) -> Self {
        non_dominated_filter(
            points
                .into_iter()
                .map(|p| SolutionRecord { bits: BinaryVector::zeros(0), objectives: ObjectiveVector(p) })
                .collect(),
        )
    }
}

/// `a` is no worse everywhere and strictly better somewhere.
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), actual: b.len() });
    }
    Ok(dominates_slice(a.values(), b.values()))
}

#[inline]
fn dominates_slice(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

/// Keeps records no other record dominates; exact duplicates collapse to the
/// first occurrence. Input order is preserved.
pub fn non_dominated_filter(points: Vec<SolutionRecord>) -> FrontSet {
    let mut keep = vec![true; points.len()];
    for i in 0..points.len() {
        let pi = points[i].objectives.values();
        for (j, pj) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let pj = pj.objectives.values();
            if dominates_slice(pj, pi) || (j < i && pj == pi) {
                keep[i] = false;
                break;
            }
        }
    }
    FrontSet { records: points.into_iter().zip(keep).filter(|(_, k)| *k).map(|(r, _)| r).collect() }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactHv {
    pub volume: f64,
    /// Points not weakly dominating the reference, left out of the union.
    pub clipped: usize,
}

/// Lebesgue measure of `∪ [p, ref]` over the front.
pub fn hypervolume_exact(front: &FrontSet, reference: &ObjectiveVector) -> Result<ExactHv> {
    let m = reference.len();
    if m == 0 || m > MAX_EXACT_DIM {
        return Err(Error::UnsupportedDimension(m));
    }
    let mut clipped = 0;
    let mut pts: Vec<&[f64]> = Vec::with_capacity(front.len());
    for p in front.points() {
        if p.len() != m {
            return Err(Error::DimensionMismatch { expected: m, actual: p.len() });
        }
        if p.iter().zip(reference.values()).any(|(a, r)| a > r) {
            clipped += 1;
        } else {
            pts.push(p);
        }
    }
    if clipped > 0 {
        log::warn!("{clipped} point(s) do not dominate the reference and were left out");
    }
    Ok(ExactHv { volume: hv_points(&pts, reference.values()), clipped })
}

/// Exact hypervolume of points already known to satisfy `p <= ref`.
pub(crate) fn hv_points(points: &[&[f64]], reference: &[f64]) -> f64 {
    let owned: Vec<Vec<f64>> =
        points.iter().filter(|p| p.iter().zip(reference).all(|(a, r)| a < r)).map(|p| p.to_vec()).collect();
    hv_recursive(owned, reference)
}

// Slices along the last coordinate and recurses on the projection; points equal
// to the reference in some coordinate were dropped by the caller (zero volume).
fn hv_recursive(mut pts: Vec<Vec<f64>>, reference: &[f64]) -> f64 {
    let d = reference.len();
    if pts.is_empty() {
        return 0.0;
    }
    match d {
        1 => reference[0] - pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min),
        2 => {
            pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
            let mut area = 0.0;
            let mut y_floor = reference[1];
            for p in &pts {
                if p[1] < y_floor {
                    area += (reference[0] - p[0]) * (y_floor - p[1]);
                    y_floor = p[1];
                }
            }
            area
        }
        _ => {
            pts.sort_by(|a, b| a[d - 1].total_cmp(&b[d - 1]));
            let sub_ref = &reference[..d - 1];
            let mut volume = 0.0;
            let mut active: Vec<Vec<f64>> = Vec::with_capacity(pts.len());
            for (k, p) in pts.iter().enumerate() {
                let proj = &p[..d - 1];
                if !active.iter().any(|a| a.iter().zip(proj).all(|(x, y)| x <= y)) {
                    active.retain(|a| !a.iter().zip(proj).all(|(x, y)| y <= x));
                    active.push(proj.to_vec());
                }
                let top = pts.get(k + 1).map_or(reference[d - 1], |q| q[d - 1]);
                let depth = top - p[d - 1];
                if depth > 0.0 {
                    volume += hv_recursive(active.clone(), sub_ref) * depth;
                }
            }
            volume
        }
    }
}

/// Shared reference box for one multi-objective problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HvProtocol {
    pub ref_point_count: usize,
    /// Componentwise maximum over every compared solution.
    pub z_ref: ObjectiveVector,
    /// Componentwise minimum over the same solutions.
    pub z_desire: ObjectiveVector,
    pub seed: u64,
}

impl HvProtocol {
    /// `2·z_ref − z_desire`, the far corner of the sampling box.
    pub fn z_anti(&self) -> ObjectiveVector {
        ObjectiveVector(self.z_ref.values().iter().zip(self.z_desire.values()).map(|(r, d)| 2.0 * r - d).collect())
    }

    pub fn validate(&self) -> Result<()> {
        if self.ref_point_count == 0 {
            return Err(Error::InvalidConfig("ref_point_count must be at least 1".into()));
        }
        if self.z_ref.len() != self.z_desire.len() {
            return Err(Error::DimensionMismatch { expected: self.z_ref.len(), actual: self.z_desire.len() });
        }
        if self.z_desire.values().iter().zip(self.z_ref.values()).any(|(d, r)| d > r) {
            return Err(Error::InvalidConfig("z_desire must not exceed z_ref".into()));
        }
        Ok(())
    }

    /// Reference point `k`, uniform in `[z_ref, z_anti]`, from its own substream.
    pub fn reference_point(&self, k: usize) -> Vec<f64> {
        use rand::Rng as _;
        let mut r = rng::stream(self.seed, k as u64);
        self.z_ref
            .values()
            .iter()
            .zip(self.z_desire.values())
            .map(|(&zr, &zd)| {
                let width = zr - zd;
                let u: f64 = r.random();
                if width > 0.0 {
                    zr + u * width
                } else {
                    zr
                }
            })
            .collect()
    }
}

/// The box spans every solution of every method being compared.
pub fn build_protocol(fronts: &[FrontSet], count: usize, seed: u64) -> Result<HvProtocol> {
    let mut pts = fronts.iter().flat_map(FrontSet::points);
    let first = pts.next().ok_or(Error::EmptyUnion)?;
    let mut hi = first.to_vec();
    let mut lo = first.to_vec();
    for p in pts {
        if p.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: hi.len(), actual: p.len() });
        }
        for (k, &v) in p.iter().enumerate() {
            hi[k] = hi[k].max(v);
            lo[k] = lo[k].min(v);
        }
    }
    let proto = HvProtocol { ref_point_count: count, z_ref: ObjectiveVector(hi), z_desire: ObjectiveVector(lo), seed };
    proto.validate()?;
    Ok(proto)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypervolumeResult {
    pub mean: f64,
    /// Spread across reference points (population standard deviation).
    pub std: f64,
    pub count: usize,
    pub z_ref: Vec<f64>,
    pub z_anti: Vec<f64>,
}

/// Mean and spread of the exact hypervolume over the protocol's random
/// reference points.
pub fn averaged_hypervolume(front: &FrontSet, proto: &HvProtocol) -> Result<HypervolumeResult> {
    averaged_hypervolume_with(front, proto, Exec::default())
}

pub fn averaged_hypervolume_with(front: &FrontSet, proto: &HvProtocol, exec: Exec) -> Result<HypervolumeResult> {
    proto.validate()?;
    let m = proto.z_ref.len();
    if m == 0 || m > MAX_EXACT_DIM {
        return Err(Error::UnsupportedDimension(m));
    }
    for p in front.points() {
        if p.len() != m {
            return Err(Error::DimensionMismatch { expected: m, actual: p.len() });
        }
    }
    let pts: Vec<&[f64]> = front.points().collect();
    let volumes = exec.map(proto.ref_point_count, |k| {
        let r = proto.reference_point(k);
        let inside: Vec<&[f64]> = pts.iter().copied().filter(|p| p.iter().zip(&r).all(|(a, b)| a <= b)).collect();
        hv_points(&inside, &r)
    });
    let (mean, std) = mean_std(&volumes);
    Ok(HypervolumeResult {
        mean,
        std,
        count: proto.ref_point_count,
        z_ref: proto.z_ref.0.clone(),
        z_anti: proto.z_anti().0,
    })
}

/// Mean and population standard deviation, summed in index order.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}
