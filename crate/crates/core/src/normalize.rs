//! Inertia-tensor normalization of domains, box sandwiches, the box
//! estimate on projective maps, degeneration analysis of sequences of
//! representations, and a bounded search for invariant subspaces.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{Backend, ConvexDomain, DomainSpec};
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::projgeom::{DualFunctional, ProjTransform};
use crate::vinberg::{self, unit_ball_volume};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentData {
    pub centroid: Vec<f64>,
    /// Central second-moment matrix normalized by volume.
    pub second_moment: Vec<Vec<f64>>,
    pub volume: f64,
}

impl MomentData {
    pub fn centroid_vector(&self) -> Vector {
        Vector::from_column_slice(&self.centroid)
    }

    pub fn second_moment_matrix(&self) -> Matrix {
        linalg::matrix(&self.second_moment)
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `moments`: exact for every backend. Simplices use
/// `∫xxᵀ = vol/((n+1)(n+2))·(Σpᵢpᵢᵀ + ssᵀ)` with `s = Σpᵢ`; ellipsoids have
/// second moment `E/(n+2)`.
pub fn moments(omega: &ConvexDomain) -> Result<MomentData> {
    omega.validate()?;
    let n = omega.dim();
    let (centroid, q, volume) = match omega.backend() {
        Backend::Ellipsoid(e) => {
            let vol = unit_ball_volume(n) * linalg::det(&e.shape).sqrt();
            (e.center.clone(), &e.shape / (n as f64 + 2.0), vol)
        }
        _ => {
            let mut vol = 0.0;
            let mut first = Vector::zeros(n);
            let mut second = Matrix::zeros(n, n);
            for s in omega.simplices().expect("polyhedral") {
                let edges = Matrix::from_fn(n, n, |i, j| s[j + 1][i] - s[0][i]);
                let v = linalg::det(&edges).abs() / factorial(n);
                let mut sum = Vector::zeros(n);
                let mut outer = Matrix::zeros(n, n);
                for p in &s {
                    sum += p;
                    outer += p * p.transpose();
                }
                vol += v;
                first += &sum * (v / (n as f64 + 1.0));
                second += (outer + &sum * sum.transpose()) * (v / ((n as f64 + 1.0) * (n as f64 + 2.0)));
            }
            let c = first / vol;
            let q = second / vol - &c * c.transpose();
            (c, q, vol)
        }
    };
    let q = (&q + q.transpose()) * 0.5;
    if !(q.clone().symmetric_eigen().eigenvalues.min() > 0.0) {
        return Err(Error::DegenerateDomain("second moment is not positive definite".into()));
    }
    Ok(MomentData {
        centroid: centroid.iter().copied().collect(),
        second_moment: linalg::to_rows(&q),
        volume,
    })
}

/// Certified fits `K⁻¹𝔅 ⊂ Ω ⊂ K𝔅` for the unit box `𝔅 = [−1,1]^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxSandwich {
    pub inner_k: f64,
    pub outer_k: f64,
    /// Smallest `r` with `Ω ⊂ r𝔅`, from `2n` support evaluations.
    pub outer_extent: f64,
    /// Largest `r` with `r𝔅 ⊂ cl Ω`, from the `2^n` box diagonals.
    pub inner_extent: f64,
    pub certified: bool,
}

impl BoxSandwich {
    /// Empirical sandwich ratio used as the corpus constant.
    pub fn ratio(&self) -> f64 {
        self.outer_extent / self.inner_extent
    }
}

fn box_vertices(n: usize) -> Vec<Vector> {
    (0..1usize << n)
        .map(|mask| Vector::from_fn(n, |i, _| if mask >> i & 1 == 1 { 1.0 } else { -1.0 }))
        .collect()
}

/// `K = max(1, outer_extent, 1/inner_extent)`, used for both fits and then
/// re-checked: the outer fit by support values, the inner fit by the box
/// vertices of `K⁻¹𝔅` lying in the closure.
pub fn box_sandwich(omega: &ConvexDomain) -> BoxSandwich {
    let n = omega.dim();
    let mut outer: f64 = 0.0;
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = Vector::zeros(n);
            e[i] = s;
            outer = outer.max(omega.support_function(&e));
        }
    }
    let origin = Vector::zeros(n);
    let inner = if omega.margin(&origin) > 0.0 {
        box_vertices(n).iter().map(|w| omega.ray_exit(&origin, w)).fold(f64::INFINITY, f64::min)
    } else {
        0.0
    };
    let k = 1f64.max(outer).max(1.0 / inner);
    let certified = inner > 0.0
        && (0..n).all(|i| {
            [1.0, -1.0].iter().all(|&s| {
                let mut e = Vector::zeros(n);
                e[i] = s;
                omega.support_function(&e) <= k * (1.0 + 1e-12)
            })
        })
        && box_vertices(n).iter().all(|w| omega.margin(&(w / k)) >= -1e-12);
    BoxSandwich { inner_k: k, outer_k: k, outer_extent: outer, inner_extent: inner, certified }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Isotropic {
    /// Orthogonal `U` with `Q = U Λ Uᵀ`, eigenvalues non-increasing.
    pub rotation: Matrix,
    /// Diagonal of `D = Λ^{-1/2}`.
    pub scale: Vector,
    /// Homogeneous chart map `[[D Uᵀ, −D Uᵀ c], [0, 1]]`.
    pub affine: Matrix,
    /// The same map acting on R^{n+1}.
    pub transform: ProjTransform,
    pub domain: ConvexDomain,
    pub sandwich: BoxSandwich,
    pub moments: MomentData,
}

/// Ambient matrix of a homogeneous chart map.
pub fn chart_map_to_ambient(omega: &ConvexDomain, affine: &Matrix) -> Matrix {
    let chart = omega.chart();
    let n = chart.dim();
    let mut b = Matrix::zeros(n + 1, n + 1);
    b.view_mut((0, 0), (n + 1, n)).copy_from(chart.frame());
    b.set_column(n, chart.pole());
    &b * affine * b.transpose()
}

/// `isotropic_normalize`: centroid to 0, `Q` diagonalized with
/// non-increasing eigenvalues, then scaled by `Λ^{-1/2}`.
pub fn isotropic_normalize(omega: &ConvexDomain) -> Result<Isotropic> {
    let m = moments(omega)?;
    let n = omega.dim();
    let (lambda, u) = linalg::sym_eigen_sorted(&m.second_moment_matrix());
    if !(lambda.min() > 1e-14 * lambda.max()) {
        return Err(Error::DegenerateDomain("second moment is rank deficient".into()));
    }
    let scale = lambda.map(|l| l.powf(-0.5));
    let lin = Matrix::from_diagonal(&scale) * u.transpose();
    let shift = -(&lin * m.centroid_vector());
    let mut affine = Matrix::identity(n + 1, n + 1);
    affine.view_mut((0, 0), (n, n)).copy_from(&lin);
    for i in 0..n {
        affine[(i, n)] = shift[i];
    }
    let transform = ProjTransform::new(chart_map_to_ambient(omega, &affine))?;
    let domain = omega.transform(&transform)?;
    let sandwich = box_sandwich(&domain);
    Ok(Isotropic { rotation: u, scale, affine, transform, domain, sandwich, moments: m })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxCheck {
    /// Whether `[A]𝔅 ⊂ K𝔅` was verified at the box vertices.
    pub hypothesis: bool,
    /// Whether `|A_ij| ≤ 2K|A_{n+1,n+1}|` for all entries.
    pub holds: bool,
    /// `2K|A_{n+1,n+1}| − |A_ij|`, row-major.
    pub margins: Vec<Vec<f64>>,
    pub min_margin: f64,
}

/// `box_bound_check`. The hypothesis is checked exactly: the image of the
/// box avoids infinity iff the last homogeneous coordinate has one sign on
/// all box vertices, and then lies in `K𝔅` iff every vertex image does.
pub fn box_bound_check(a: &Matrix, k: f64) -> Result<BoxCheck> {
    let d = a.nrows();
    if d < 2 || a.ncols() != d || a.iter().any(|x| !x.is_finite()) || !(k >= 1.0) {
        return Err(invalid("box check needs a square matrix and K ≥ 1"));
    }
    let n = d - 1;
    let mut sign = 0.0;
    let mut hypothesis = true;
    for w in box_vertices(n) {
        let mut h = Vector::from_element(d, 1.0);
        h.rows_mut(0, n).copy_from(&w);
        let y = a * h;
        let s = y[n];
        if s == 0.0 || (sign != 0.0 && s.signum() != sign) {
            hypothesis = false;
            break;
        }
        sign = s.signum();
        if (0..n).any(|i| (y[i] / s).abs() > k * (1.0 + 1e-12)) {
            hypothesis = false;
            break;
        }
    }
    let bound = 2.0 * k * a[(n, n)].abs();
    let margins: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| bound - a[(i, j)].abs()).collect()).collect();
    let min_margin = margins.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let tol = 1e-12 * a.amax();
    Ok(BoxCheck { hypothesis, holds: min_margin >= -tol, margins, min_margin })
}

/// Box estimate for an automorphism of a sandwiched domain: with
/// `K⁻¹𝔅 ⊂ Ω ⊂ K𝔅` and `A` preserving `Ω`, the map `A·diag(K⁻¹,…,K⁻¹,1)`
/// sends `𝔅` into `K𝔅`.
pub fn automorphism_box_check(a: &Matrix, sandwich: &BoxSandwich) -> Result<BoxCheck> {
    let d = a.nrows();
    let k = sandwich.outer_k.max(sandwich.inner_k);
    let mut s = Matrix::identity(d, d) / k;
    s[(d - 1, d - 1)] = 1.0;
    box_bound_check(&(a * s), k)
}

/// A sequence of representations with one domain per term.
#[derive(Debug, Clone, PartialEq)]
pub struct RepSequence {
    pub generators: Vec<String>,
    pub terms: Vec<Vec<Matrix>>,
    pub domains: Option<Vec<ConvexDomain>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepSequenceSpec {
    pub generators: Vec<String>,
    pub terms: Vec<Vec<Vec<Vec<f64>>>>,
    #[serde(default)]
    pub domains: Option<Vec<DomainSpec>>,
}

impl RepSequence {
    pub fn new(generators: Vec<String>, terms: Vec<Vec<Matrix>>, domains: Option<Vec<ConvexDomain>>) -> Result<Self> {
        let d = terms.first().and_then(|t| t.first()).map(|m| m.nrows()).unwrap_or(0);
        for t in &terms {
            if t.len() != generators.len() {
                return Err(invalid("each term needs one matrix per generator"));
            }
            for m in t {
                if m.nrows() != d || m.ncols() != d || m.iter().any(|x| !x.is_finite()) {
                    return Err(invalid("term matrices must be square of equal size"));
                }
                if (linalg::det(m).abs() - 1.0).abs() > 1e-9 {
                    return Err(invalid("term matrices must have |det| = 1"));
                }
            }
        }
        if let Some(ds) = &domains {
            if ds.len() != terms.len() || ds.iter().any(|o| o.dim() + 1 != d) {
                return Err(invalid("one domain of matching dimension per term is required"));
            }
        }
        Ok(Self { generators, terms, domains })
    }

    /// Parses the sequence file; matrices with `|det| ≠ 1` are rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: RepSequenceSpec =
            serde_json::from_str(text).map_err(|e| invalid(format!("malformed sequence file: {e}")))?;
        let terms = spec
            .terms
            .iter()
            .map(|t| t.iter().map(|m| linalg::matrix(m)).collect())
            .collect();
        let domains = match &spec.domains {
            Some(ds) => Some(ds.iter().map(|d| d.build()).collect::<Result<Vec<_>>>()?),
            None => None,
        };
        Self::new(spec.generators, terms, domains)
    }

    pub fn to_spec(&self) -> RepSequenceSpec {
        RepSequenceSpec {
            generators: self.generators.clone(),
            terms: self.terms.iter().map(|t| t.iter().map(linalg::to_rows).collect()).collect(),
            domains: self.domains.as_ref().map(|ds| ds.iter().map(|d| d.to_spec()).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepReport {
    pub k: usize,
    /// Diagonal of `D_k`, last entry 1.
    pub d_diag: Vec<f64>,
    /// Projective norm `max d / min d`.
    pub d_norm: f64,
    pub max_entry_raw: f64,
    pub max_entry: f64,
    pub corner_residual: f64,
    /// Distance to the previous conjugated tuple, up to sign.
    pub cauchy_residual: Option<f64>,
    /// Support-function distance of the conjugated domain to the previous
    /// one.
    pub support_residual: Option<f64>,
    pub conjugated: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockPattern {
    /// Size of the upper-left diagonal block.
    pub split: usize,
    /// Norm of the lower-left block of the limit tuple.
    pub residual: f64,
    pub triangular: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegenerationReport {
    pub steps: Vec<StepReport>,
    pub slope: f64,
    pub d_bounded: bool,
    pub raw_bounded: bool,
    pub conjugated_bounded: bool,
    pub corner_invariant: bool,
    pub block_pattern: Option<BlockPattern>,
    /// Invariant-subspace search on the last conjugated tuple.
    pub limit_irreducible: bool,
    pub verdict: String,
}

impl DegenerationReport {
    /// CSV time series with columns `k,d_norm,residual,max_entry`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,d_norm,residual,max_entry\n");
        for s in &self.steps {
            out.push_str(&format!(
                "{},{:.12e},{:.12e},{:.12e}\n",
                s.k,
                s.d_norm,
                s.cauchy_residual.unwrap_or(0.0),
                s.max_entry
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequenceOptions {
    /// Threshold on the fitted slope of `log‖D_k‖` (and of log max entries).
    pub slope_threshold: f64,
    pub block_tol: f64,
    pub search_tol: f64,
    pub search_length: usize,
}

impl Default for SequenceOptions {
    fn default() -> Self {
        Self { slope_threshold: 1e-2, block_tol: 1e-6, search_tol: 1e-8, search_length: 4 }
    }
}

fn ls_slope(ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    if ys.len() < 2 {
        return 0.0;
    }
    let mx = (n - 1.0) / 2.0;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in ys.iter().enumerate() {
        let dx = i as f64 - mx;
        sxy += dx * (y - my);
        sxx += dx * dx;
    }
    sxy / sxx
}

struct Normalized {
    d: Vector,
    rotated: Vec<Matrix>,
    domain: ConvexDomain,
}

fn normalize_term(omega: &ConvexDomain, gens: &[Matrix]) -> Result<Normalized> {
    let dim = omega.dim() + 1;
    let sc = vinberg::spherical_center(omega)?;
    let mut e = Vector::zeros(dim);
    e[dim - 1] = 1.0;
    let to_pole = linalg::rotation_taking(omega.chart().pole(), &e);
    let alpha = to_pole * sc.rotation.matrix();
    let standard = DualFunctional::coordinate(dim, dim - 1);
    let rotated_domain = omega.transform(&ProjTransform::new(alpha.clone())?)?.rechart(&standard)?;
    let iso = isotropic_normalize(&rotated_domain)?;
    let mut u = Matrix::identity(dim, dim);
    u.view_mut((0, 0), (dim - 1, dim - 1)).copy_from(&iso.rotation);
    let mut d = Vector::from_element(dim, 1.0);
    d.rows_mut(0, dim - 1).copy_from(&iso.scale);
    let ua = u.transpose() * &alpha;
    let rotated: Vec<Matrix> = gens.iter().map(|a| &ua * a * ua.transpose()).collect();
    let domain = rotated_domain.transform(&ProjTransform::new(Matrix::from_diagonal(&d) * u.transpose())?)?;
    Ok(Normalized { d, rotated, domain })
}

fn support_distance(a: &ConvexDomain, b: &ConvexDomain) -> f64 {
    let n = a.dim();
    let dirs: Vec<Vector> = if n == 2 {
        (0..64)
            .map(|j| {
                let t = 2.0 * std::f64::consts::PI * j as f64 / 64.0;
                linalg::vector(&[t.cos(), t.sin()])
            })
            .collect()
    } else {
        box_vertices(n)
            .into_iter()
            .chain((0..n).flat_map(|i| {
                [1.0, -1.0].map(|s| Vector::from_fn(n, |k, _| if k == i { s } else { 0.0 }))
            }))
            .map(|v| v.normalize())
            .collect()
    };
    dirs.iter()
        .map(|u| (a.support_function(u) - b.support_function(u)).abs())
        .fold(0.0, f64::max)
}

/// `analyze_sequence`: per term, spherical center, rotation to the pole,
/// isotropic normalization by `D_k`, and conjugation `B = D_k A D_k⁻¹`.
pub fn analyze_sequence(seq: &RepSequence, opts: &SequenceOptions) -> Result<DegenerationReport> {
    let domains = seq.domains.as_ref().ok_or_else(|| invalid("sequence analysis needs one domain per term"))?;
    if seq.terms.is_empty() {
        return Err(invalid("empty sequence"));
    }
    let normalized = domains
        .par_iter()
        .zip(seq.terms.par_iter())
        .map(|(omega, gens)| normalize_term(omega, gens))
        .collect::<Result<Vec<_>>>()?;

    let mut steps = Vec::with_capacity(normalized.len());
    let mut corner_invariant = true;
    let mut conj_all: Vec<Vec<Matrix>> = Vec::new();
    for (k, (nz, raw)) in normalized.iter().zip(&seq.terms).enumerate() {
        let dinv = nz.d.map(|x| 1.0 / x);
        let b: Vec<Matrix> = nz
            .rotated
            .iter()
            .map(|a| Matrix::from_diagonal(&nz.d) * a * Matrix::from_diagonal(&dinv))
            .collect();
        let last = nz.d.len() - 1;
        let corner_residual = b
            .iter()
            .zip(&nz.rotated)
            .map(|(bm, am)| (bm[(last, last)] - am[(last, last)]).abs())
            .fold(0.0, f64::max);
        corner_invariant &= corner_residual <= 1e-12 * (1.0 + b.iter().map(|m| m.amax()).fold(0.0, f64::max));
        let prev = k.checked_sub(1).map(|j| (&conj_all[j], &normalized[j].domain));
        let cauchy_residual = prev.map(|(pb, _)| {
            b.iter()
                .zip(pb)
                .map(|(x, y)| (x - y).norm().min((x + y).norm()))
                .fold(0.0, f64::max)
        });
        let support_residual = prev.map(|(_, pd)| support_distance(&nz.domain, pd));
        steps.push(StepReport {
            k: k + 1,
            d_diag: nz.d.iter().copied().collect(),
            d_norm: nz.d.max() / nz.d.min(),
            max_entry_raw: raw.iter().map(|m| m.amax()).fold(0.0, f64::max),
            max_entry: b.iter().map(|m| m.amax()).fold(0.0, f64::max),
            corner_residual,
            cauchy_residual,
            support_residual,
            conjugated: b.iter().map(linalg::to_rows).collect(),
        });
        conj_all.push(b);
    }

    let slope = ls_slope(&steps.iter().map(|s| s.d_norm.ln()).collect::<Vec<_>>());
    let d_bounded = slope <= opts.slope_threshold;
    let raw_slope = ls_slope(&steps.iter().map(|s| s.max_entry_raw.ln()).collect::<Vec<_>>());
    let conj_slope = ls_slope(&steps.iter().map(|s| s.max_entry.ln()).collect::<Vec<_>>());
    let raw_bounded = raw_slope <= opts.slope_threshold;
    let conjugated_bounded = conj_slope <= opts.slope_threshold;

    let limit = conj_all.last().expect("nonempty");
    let block_pattern = if d_bounded {
        None
    } else {
        let d = limit.first().map(|m| m.nrows()).unwrap_or(0);
        (1..d)
            .map(|p| {
                let residual = limit
                    .iter()
                    .map(|m| m.view((p, 0), (d - p, p)).norm() / m.norm().max(f64::MIN_POSITIVE))
                    .fold(0.0, f64::max);
                BlockPattern { split: p, residual, triangular: residual <= opts.block_tol }
            })
            .min_by(|a, b| a.residual.total_cmp(&b.residual))
    };
    let limit_irreducible = limit.is_empty()
        || invariant_subspace_search(limit, opts.search_tol, opts.search_length).is_none();

    let verdict = match (d_bounded, conjugated_bounded, limit_irreducible) {
        (true, _, true) => "convergent, irreducible",
        (true, _, false) => "convergent, reducible",
        (false, true, _) => "normalizing diagonals unbounded; conjugated tuples bounded",
        (false, false, _) => "degenerate",
    }
    .to_string();

    Ok(DegenerationReport {
        steps,
        slope,
        d_bounded,
        raw_bounded,
        conjugated_bounded,
        corner_invariant,
        block_pattern,
        limit_irreducible,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubspaceWitness {
    /// Orthonormal basis of the invariant subspace (of the transposed family
    /// when `dual` is set; its annihilator is then invariant).
    pub basis: Vec<Vec<f64>>,
    /// Word whose eigenspaces produced the witness, as generator indices
    /// with `-` marking inverses.
    pub word: String,
    pub dual: bool,
    pub residual: f64,
}

pub(crate) fn reduced_words(k: usize, max_len: usize) -> Vec<Vec<(usize, bool)>> {
    let mut all: Vec<Vec<(usize, bool)>> = Vec::new();
    let mut frontier: Vec<Vec<(usize, bool)>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for g in 0..k {
                for inv in [false, true] {
                    if let Some(&(lg, linv)) = w.last() {
                        if lg == g && linv != inv {
                            continue;
                        }
                    }
                    let mut nw = w.clone();
                    nw.push((g, inv));
                    next.push(nw);
                }
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

pub(crate) fn word_label(w: &[(usize, bool)]) -> String {
    w.iter()
        .map(|(g, inv)| if *inv { format!("-{g}") } else { format!("{g}") })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Real invariant blocks of `w`: eigenspaces of real eigenvalues (with
/// their individual basis vectors when multi-dimensional) and the real
/// planes of complex pairs.
fn eigen_blocks(w: &Matrix) -> Vec<Vec<Vector>> {
    let d = w.nrows();
    let scale = w.amax().max(1.0);
    let eig = w.clone().complex_eigenvalues();
    let id = Matrix::identity(d, d);
    let mut blocks: Vec<Vec<Vector>> = Vec::new();
    let mut seen: Vec<(f64, f64)> = Vec::new();
    for l in eig.iter() {
        let (re, im) = (l.re, l.im.abs());
        if seen.iter().any(|(a, b)| (a - re).abs() <= 1e-9 * scale && (b - im).abs() <= 1e-9 * scale) {
            continue;
        }
        seen.push((re, im));
        let m = if im <= 1e-9 * scale {
            w - &id * re
        } else {
            w * w - w * (2.0 * re) + &id * (re * re + im * im)
        };
        let ns = linalg::null_space(&m, 1e-8);
        if ns.is_empty() {
            continue;
        }
        if im <= 1e-9 * scale && ns.len() > 1 {
            for v in &ns {
                blocks.push(vec![v.clone()]);
            }
        }
        blocks.push(ns);
    }
    blocks
}

fn invariance_residual(gens: &[Matrix], basis: &Matrix) -> f64 {
    let d = basis.nrows();
    let proj = Matrix::identity(d, d) - basis * basis.transpose();
    gens.iter()
        .map(|g| (&proj * g * basis).norm() / g.norm().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

fn search_family(gens: &[Matrix], tol: f64, max_len: usize) -> Option<(Matrix, String, f64)> {
    let d = gens.first()?.nrows();
    let inverses: Vec<Matrix> = gens.iter().map(|g| g.clone().try_inverse().unwrap_or_else(|| g.clone())).collect();
    for word in reduced_words(gens.len(), max_len.max(1)) {
        let mut w = Matrix::identity(d, d);
        for &(g, inv) in &word {
            w = &w * if inv { &inverses[g] } else { &gens[g] };
        }
        let blocks = eigen_blocks(&w);
        let nb = blocks.len().min(16);
        let mut subsets: Vec<usize> = (1..(1usize << nb)).collect();
        let dim_of = |mask: usize| (0..nb).filter(|i| mask >> i & 1 == 1).map(|i| blocks[i].len()).sum::<usize>();
        subsets.sort_by_key(|&m| (dim_of(m), m));
        for mask in subsets {
            let dim = dim_of(mask);
            if dim == 0 || dim >= d {
                continue;
            }
            let vs: Vec<Vector> = (0..nb).filter(|i| mask >> i & 1 == 1).flat_map(|i| blocks[i].clone()).collect();
            let m = linalg::columns(&vs);
            let svd = m.clone().svd(true, false);
            if svd.singular_values.min() < 1e-8 * svd.singular_values.max() {
                continue;
            }
            let basis = svd.u.expect("u requested").columns(0, dim).into_owned();
            let r = invariance_residual(gens, &basis);
            if r < tol {
                return Some((basis, word_label(&word), r));
            }
        }
    }
    None
}

/// `invariant_subspace_search`: eigenspace sweep over reduced words of
/// length ≤ `max_len`, for the family and its transpose. Finding nothing is
/// not a proof of irreducibility.
pub fn invariant_subspace_search(gens: &[Matrix], tol: f64, max_len: usize) -> Option<SubspaceWitness> {
    let witness = |(basis, word, residual): (Matrix, String, f64), dual: bool| SubspaceWitness {
        basis: (0..basis.ncols()).map(|j| basis.column(j).iter().copied().collect()).collect(),
        word,
        dual,
        residual,
    };
    if let Some(w) = search_family(gens, tol, max_len) {
        return Some(witness(w, false));
    }
    let transposed: Vec<Matrix> = gens.iter().map(|g| g.transpose()).collect();
    search_family(&transposed, tol, max_len).map(|w| witness(w, true))
}
