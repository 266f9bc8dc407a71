//! Monte Carlo volumes of central sections of star bodies.
//!
//! For a star body `K` with gauge `||·||_K` and a `k`-dimensional subspace
//! `E` with orthonormal basis `B` (rows),
//!
//! ```text
//! |E ∩ K|_k = |B_2^k| · E_θ[ ||θ B||_K^{-k} ],   θ uniform on S^{k-1}.
//! ```
//!
//! Samples are drawn in chunks of [`CHUNK`]; chunk `i` uses the ChaCha8
//! stream `i` of the key derived from the seed, so every chunk can be
//! computed independently and the merged estimate does not depend on how
//! chunks are scheduled.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::geometry::{log_volume_euclidean, InnerNorm, PBall, PSumBody};

/// Samples per RNG stream.
pub const CHUNK: u64 = 1 << 14;
pub const MIN_SAMPLES: u64 = 1000;
const HAAR_ATTEMPTS: u64 = 5;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent child seed number `index` of `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix(seed.wrapping_add(mix(index.wrapping_add(0x9e37_79b9_7f4a_7c15))))
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Transcendentals of the sampling loop. With the `std` feature these are
/// the platform's, which are several times faster than `libm`.
mod fast {
    #[cfg(feature = "std")]
    pub fn exp(x: f64) -> f64 {
        x.exp()
    }
    #[cfg(feature = "std")]
    pub fn ln(x: f64) -> f64 {
        x.ln()
    }
    #[cfg(not(feature = "std"))]
    pub use libm::{exp, log as ln};
}

/// `|x|^p` with cheap paths for the common exponents.
#[derive(Clone, Copy, Debug)]
enum Power {
    Half,
    One,
    ThreeHalves,
    Two,
    General(f64),
}

impl Power {
    fn new(p: f64) -> Self {
        match p {
            _ if p == 0.5 => Power::Half,
            _ if p == 1.0 => Power::One,
            _ if p == 1.5 => Power::ThreeHalves,
            _ if p == 2.0 => Power::Two,
            _ => Power::General(p),
        }
    }

    #[inline]
    fn apply(self, a: f64) -> f64 {
        match self {
            Power::Half => libm::sqrt(a),
            Power::One => a,
            Power::ThreeHalves => a * libm::sqrt(a),
            Power::Two => a * a,
            Power::General(p) => {
                if a == 0.0 {
                    0.0
                } else {
                    fast::exp(p * fast::ln(a))
                }
            }
        }
    }
}

/// A body given by its gauge (Minkowski functional).
pub trait StarBody {
    fn dim(&self) -> usize;
    /// `ln ||x||_K` for `x != 0`.
    fn log_gauge(&self, x: &[f64]) -> f64;
}

/// `ln (sum a_i^p)^{1/p}` for `a_i >= 0`. The direct sum is used when it
/// is a normal number; otherwise the terms are rescaled by the largest one
/// so that small exponents and long vectors neither underflow nor overflow.
fn log_p_sum<I: Iterator<Item = f64> + Clone>(a: I, p: f64, pw: Power) -> f64 {
    let s: f64 = a.clone().map(|v| pw.apply(v)).sum();
    if s.is_normal() {
        return fast::ln(s) / p;
    }
    let m = a.clone().fold(0.0f64, f64::max);
    if m == 0.0 {
        return f64::NEG_INFINITY;
    }
    let s: f64 = a.map(|v| pw.apply(v / m)).sum();
    fast::ln(m) + fast::ln(s) / p
}

impl StarBody for PBall {
    fn dim(&self) -> usize {
        self.n()
    }
    fn log_gauge(&self, x: &[f64]) -> f64 {
        log_p_sum(x.iter().map(|v| v.abs()), self.p(), Power::new(self.p()))
    }
}

impl StarBody for PSumBody {
    fn dim(&self) -> usize {
        PSumBody::dim(self)
    }
    fn log_gauge(&self, x: &[f64]) -> f64 {
        let norms = self.parts().iter().scan(0, |off, &(d, nm)| {
            let blk = &x[*off..*off + d];
            *off += d;
            Some(match nm {
                InnerNorm::Euclidean => libm::sqrt(blk.iter().map(|v| v * v).sum()),
                InnerNorm::Ell1 => blk.iter().map(|v| v.abs()).sum(),
            })
        });
        log_p_sum(norms, self.p(), Power::new(self.p()))
    }
}

/// `t K` for a body `K`.
#[derive(Clone, Debug)]
pub struct Scaled<B> {
    pub body: B,
    pub factor: f64,
}

impl<B: StarBody> StarBody for Scaled<B> {
    fn dim(&self) -> usize {
        self.body.dim()
    }
    fn log_gauge(&self, x: &[f64]) -> f64 {
        self.body.log_gauge(x) - libm::log(self.factor)
    }
}

/// A `k`-dimensional subspace of `R^n` with an orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Subspace {
    n: usize,
    k: usize,
    /// Row-major `k × n`.
    basis: Vec<f64>,
}

pub const ORTHONORMAL_TOL: f64 = 1e-12;

impl Subspace {
    /// Validates `basis · basisᵀ = I_k`.
    pub fn new(n: usize, k: usize, basis: Vec<f64>) -> Result<Self> {
        if k < 1 || k > n {
            return Err(invalid!("subspace dimension {k} outside 1..={n}"));
        }
        if basis.len() != n * k {
            return Err(invalid!("basis has {} entries, expected {}", basis.len(), n * k));
        }
        let s = Subspace { n, k, basis };
        let r = s.orthonormality_residual();
        if !(r <= ORTHONORMAL_TOL) {
            return Err(invalid!("basis rows are not orthonormal (residual {r:e})"));
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.basis[i * self.n..(i + 1) * self.n]
    }

    /// `max |B Bᵀ - I|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.k {
            for j in 0..=i {
                let d: f64 = self.row(i).iter().zip(self.row(j)).map(|(a, b)| a * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((d - target).abs());
            }
        }
        worst
    }

    /// `span{e_1, ..., e_k}`.
    pub fn axis_aligned(n: usize, k: usize) -> Result<Self> {
        let mut b = vec![0.0; n * k];
        for i in 0..k.min(n) {
            b[i * n + i] = 1.0;
        }
        Subspace::new(n, k, b)
    }

    /// Coordinates split into `k` consecutive blocks of near-equal size;
    /// row `i` is the normalized indicator of block `i`. For `k = 1` this
    /// is the diagonal `span{(1, ..., 1)}`.
    pub fn block_diagonal(n: usize, k: usize) -> Result<Self> {
        if k < 1 || k > n {
            return Err(invalid!("subspace dimension {k} outside 1..={n}"));
        }
        let mut b = vec![0.0; n * k];
        let mut start = 0;
        for i in 0..k {
            let len = n / k + usize::from(i < n % k);
            let v = 1.0 / libm::sqrt(len as f64);
            for j in start..start + len {
                b[i * n + j] = v;
            }
            start += len;
        }
        Subspace::new(n, k, b)
    }

    /// `Q B` for an orthogonal `k × k` matrix `Q` (row-major): the same
    /// subspace with another basis.
    pub fn rotated(&self, q: &[f64]) -> Result<Self> {
        if q.len() != self.k * self.k {
            return Err(invalid!("rotation must be {0} x {0}", self.k));
        }
        let mut b = vec![0.0; self.n * self.k];
        for i in 0..self.k {
            for l in 0..self.k {
                let c = q[i * self.k + l];
                for (dst, src) in b[i * self.n..(i + 1) * self.n].iter_mut().zip(self.row(l)) {
                    *dst += c * src;
                }
            }
        }
        Subspace::new(self.n, self.k, b)
    }

    fn embed(&self, theta: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (i, t) in theta.iter().enumerate() {
            for (o, b) in out.iter_mut().zip(self.row(i)) {
                *o += t * b;
            }
        }
    }
}

/// Modified Gram–Schmidt, applied twice. `None` on (numerical) rank loss.
fn orthonormalize(n: usize, k: usize, rows: &mut [f64]) -> Option<()> {
    for _pass in 0..2 {
        for i in 0..k {
            for j in 0..i {
                let (done, rest) = rows.split_at_mut(i * n);
                let rj = &done[j * n..(j + 1) * n];
                let ri = &mut rest[..n];
                let d: f64 = ri.iter().zip(rj).map(|(a, b)| a * b).sum();
                ri.iter_mut().zip(rj).for_each(|(a, b)| *a -= d * b);
            }
            let ri = &mut rows[i * n..(i + 1) * n];
            let norm = libm::sqrt(ri.iter().map(|v| v * v).sum());
            if !(norm > 1e-10) {
                return None;
            }
            ri.iter_mut().for_each(|v| *v /= norm);
        }
    }
    Some(())
}

/// Haar-distributed `k`-dimensional subspace of `R^n`: the orthonormalized
/// span of `k` independent standard normal vectors.
pub fn haar_subspace(n: usize, k: usize, seed: u64) -> Result<Subspace> {
    if k < 1 || k > n {
        return Err(invalid!("subspace dimension {k} outside 1..={n}"));
    }
    for attempt in 0..HAAR_ATTEMPTS {
        let s = if attempt == 0 { seed } else { derive_seed(seed, u64::MAX - attempt) };
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let mut rows: Vec<f64> = (0..n * k).map(|_| StandardNormal.sample(&mut rng)).collect();
        if orthonormalize(n, k, &mut rows).is_some() {
            return Subspace::new(n, k, rows);
        }
    }
    Err(Error::Inconclusive { what: alloc::format!("no full-rank Gaussian frame in {HAAR_ATTEMPTS} attempts"), achieved: 0.0 })
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SectionEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl SectionEstimate {
    /// `value^{1/k}` and its standard error by the delta method.
    pub fn root(&self, k: usize) -> (f64, f64) {
        let kf = k as f64;
        let r = libm::pow(self.value, 1.0 / kf);
        (r, r / (kf * self.value) * self.std_error)
    }
}

/// Sum, mean and centred second moment of `r^k` over one chunk.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ChunkStats {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl ChunkStats {
    /// Chan et al. pairwise update.
    pub fn merge(self, other: ChunkStats) -> ChunkStats {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / n;
        let m2 = self.m2 + other.m2 + delta * delta * self.count as f64 * other.count as f64 / n;
        ChunkStats { count: self.count + other.count, mean, m2 }
    }
}

/// Number of chunks for `samples`.
pub fn chunk_count(samples: u64) -> u64 {
    samples.div_ceil(CHUNK)
}

fn chunk_len(samples: u64, index: u64) -> u64 {
    CHUNK.min(samples - index * CHUNK)
}

/// Samples `index` of `samples` total for a section estimate.
pub fn section_chunk<B: StarBody + ?Sized>(body: &B, e: &Subspace, samples: u64, seed: u64, index: u64) -> ChunkStats {
    let len = chunk_len(samples, index);
    let mut rng = stream(seed, index);
    let k = e.k;
    let kf = k as f64;
    let mut theta = vec![0.0; k];
    let mut x = vec![0.0; e.n];
    // Shifted sums; the shift is the first sample.
    let (mut shift, mut s1, mut s2) = (0.0, 0.0, 0.0);
    for i in 0..len {
        let mut r2 = 0.0;
        for t in theta.iter_mut() {
            *t = StandardNormal.sample(&mut rng);
            r2 += *t * *t;
        }
        e.embed(&theta, &mut x);
        // ||θ/|θ| B||_K^{-k} = exp(k (ln|θ| - ln||θ B||_K)).
        let v = fast::exp(kf * (0.5 * fast::ln(r2) - body.log_gauge(&x)));
        if i == 0 {
            shift = v;
        }
        let d = v - shift;
        s1 += d;
        s2 += d * d;
    }
    let n = len as f64;
    ChunkStats { count: len, mean: shift + s1 / n, m2: (s2 - s1 * s1 / n).max(0.0) }
}

/// Combines per-chunk statistics, in chunk order, into an estimate.
pub fn finish_estimate(k: usize, chunks: &[ChunkStats], seed: u64) -> Result<SectionEstimate> {
    let st = chunks.iter().fold(ChunkStats::default(), |a, b| a.merge(*b));
    let ball = libm::exp(log_volume_euclidean(k)?);
    let var = if st.count > 1 { st.m2 / (st.count - 1) as f64 } else { 0.0 };
    Ok(SectionEstimate {
        value: ball * st.mean,
        std_error: ball * libm::sqrt(var.max(0.0) / st.count as f64),
        samples: st.count,
        seed,
    })
}

pub fn check_inputs<B: StarBody + ?Sized>(body: &B, e: &Subspace, samples: u64) -> Result<()> {
    if e.n != body.dim() {
        return Err(invalid!("subspace lives in R^{} but the body in R^{}", e.n, body.dim()));
    }
    if samples < MIN_SAMPLES {
        return Err(invalid!("at least {MIN_SAMPLES} samples are required, got {samples}"));
    }
    Ok(())
}

/// Estimate of `|E ∩ K|_k` for a star body.
pub fn section_volume<B: StarBody + ?Sized>(body: &B, e: &Subspace, samples: u64, seed: u64) -> Result<SectionEstimate> {
    check_inputs(body, e, samples)?;
    let chunks: Vec<ChunkStats> = (0..chunk_count(samples)).map(|i| section_chunk(body, e, samples, seed, i)).collect();
    finish_estimate(e.k, &chunks, seed)
}

/// Estimate of `|E ∩ B_p^n|_k`.
pub fn section_volume_mc(ball: &PBall, e: &Subspace, samples: u64, seed: u64) -> Result<SectionEstimate> {
    section_volume(ball, e, samples, seed)
}

/// Estimate of `|E ∩ K|_k` for a `p`-sum body.
pub fn section_volume_mc_psum(body: &PSumBody, e: &Subspace, samples: u64, seed: u64) -> Result<SectionEstimate> {
    section_volume(body, e, samples, seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Candidate {
    AxisAligned,
    BlockDiagonal,
    Haar(u64),
}

/// The subspaces probed by [`min_section_scan`], in order, with the seed
/// of each section estimate.
pub fn scan_candidates(n: usize, k: usize, trials: u64, seed: u64) -> Result<Vec<(Candidate, Subspace, u64)>> {
    if trials < 1 {
        return Err(invalid!("at least one trial is required"));
    }
    let mut out = vec![
        (Candidate::AxisAligned, Subspace::axis_aligned(n, k)?, derive_seed(seed, 0)),
        (Candidate::BlockDiagonal, Subspace::block_diagonal(n, k)?, derive_seed(seed, 1)),
    ];
    for t in 0..trials {
        let sub_seed = derive_seed(derive_seed(seed, 2), t);
        out.push((Candidate::Haar(t), haar_subspace(n, k, sub_seed)?, derive_seed(seed, 3 + t)));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanResult {
    pub min: SectionEstimate,
    pub argmin: Subspace,
    pub candidate: Candidate,
    pub evaluated: u64,
}

/// Picks the smallest estimate; ties keep the earlier candidate.
pub fn select_min(cands: Vec<(Candidate, Subspace, u64)>, estimates: Vec<SectionEstimate>) -> ScanResult {
    let evaluated = estimates.len() as u64;
    let (i, _) = estimates
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, e)| if e.value < bv { (i, e.value) } else { (bi, bv) });
    let (candidate, argmin, _) = cands.into_iter().nth(i).expect("nonempty scan");
    ScanResult { min: estimates[i], argmin, candidate, evaluated }
}

/// Minimum section estimate over `trials` Haar subspaces plus the
/// axis-aligned and block-diagonal subspaces.
pub fn min_section_scan<B: StarBody + ?Sized>(body: &B, k: usize, trials: u64, samples: u64, seed: u64) -> Result<ScanResult> {
    let cands = scan_candidates(body.dim(), k, trials, seed)?;
    let estimates = cands.iter().map(|(_, e, s)| section_volume(body, e, samples, *s)).collect::<Result<Vec<_>>>()?;
    Ok(select_min(cands, estimates))
}
