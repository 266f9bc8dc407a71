//! Multi-threaded drivers for the certification engine and the Monte Carlo
//! estimators.
//!
//! Work is split into units whose results do not depend on scheduling
//! (certification cells, sampling chunks) and merged in a fixed order, so
//! the output is identical for every worker count.

use std::time::Instant;

use gammasect_core::certify::{self, Certificate, InequalityCase, VerifyConfig};
use gammasect_core::sections::{self, ChunkStats, ScanResult, SectionEstimate, StarBody, Subspace};
use rayon::prelude::*;
use rayon::ThreadPool;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "GAMMASECT_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum PoolError {
    #[error("{THREADS_ENV} must be a positive integer, got {0:?}")]
    BadThreadCount(String),
    #[error("cannot start worker threads: {0}")]
    Build(#[from] rayon::ThreadPoolBuildError),
}

/// Worker count from [`THREADS_ENV`], `None` when unset.
pub fn threads_from_env() -> Result<Option<usize>, PoolError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(PoolError::BadThreadCount(v)),
        },
    }
}

/// A pool with `threads` workers, or rayon's default size.
pub fn pool(threads: Option<usize>) -> Result<ThreadPool, PoolError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}

/// Certificates for `cases`, in the given order. Cells of all cases are
/// processed as one parallel batch.
pub fn verify_cases(pool: &ThreadPool, cases: &[InequalityCase], cfg: &VerifyConfig) -> Vec<Certificate> {
    let start = Instant::now();
    let cells: Vec<Vec<certify::Cell>> = cases.iter().map(certify::cells).collect();
    let tasks: Vec<(usize, &certify::Cell)> =
        cells.iter().enumerate().flat_map(|(i, cs)| cs.iter().map(move |c| (i, c))).collect();
    let outcomes: Vec<certify::CellOutcome> =
        pool.install(|| tasks.par_iter().map(|&(i, c)| certify::run_cell(&cases[i], c, cfg)).collect());
    let mut outcomes = outcomes.into_iter();
    let elapsed = start.elapsed();
    cases
        .iter()
        .zip(&cells)
        .map(|(case, cs)| {
            let mine: Vec<_> = outcomes.by_ref().take(cs.len()).collect();
            let mut cert = certify::assemble(case, mine, certify::check_equalities(case, cfg));
            cert.stats.elapsed = Some(elapsed);
            cert
        })
        .collect()
}

/// Section estimate with chunks sampled in parallel.
pub fn section_volume<B: StarBody + Sync + ?Sized>(
    pool: &ThreadPool,
    body: &B,
    e: &Subspace,
    samples: u64,
    seed: u64,
) -> gammasect_core::Result<SectionEstimate> {
    sections::check_inputs(body, e, samples)?;
    let chunks: Vec<ChunkStats> = pool.install(|| {
        (0..sections::chunk_count(samples))
            .into_par_iter()
            .map(|i| sections::section_chunk(body, e, samples, seed, i))
            .collect()
    });
    sections::finish_estimate(e.k(), &chunks, seed)
}

/// Parallel [`sections::min_section_scan`]; returns the scan and every
/// candidate's estimate in candidate order.
pub fn min_section_scan<B: StarBody + Sync + ?Sized>(
    pool: &ThreadPool,
    body: &B,
    k: usize,
    trials: u64,
    samples: u64,
    seed: u64,
) -> gammasect_core::Result<(ScanResult, Vec<SectionEstimate>)> {
    let cands = sections::scan_candidates(body.dim(), k, trials, seed)?;
    for (_, e, _) in &cands {
        sections::check_inputs(body, e, samples)?;
    }
    let per = sections::chunk_count(samples);
    let tasks: Vec<(usize, u64)> = (0..cands.len()).flat_map(|c| (0..per).map(move |i| (c, i))).collect();
    let stats: Vec<ChunkStats> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(c, i)| {
                let (_, e, s) = &cands[c];
                sections::section_chunk(body, e, samples, *s, i)
            })
            .collect()
    });
    let estimates = stats
        .chunks(per as usize)
        .zip(&cands)
        .map(|(st, (_, _, s))| sections::finish_estimate(k, st, *s))
        .collect::<gammasect_core::Result<Vec<_>>>()?;
    Ok((sections::select_min(cands, estimates.clone()), estimates))
}

#[cfg(test)]
mod tests {
    use super::*;
    use gammasect_core::geometry::PBall;

    #[test]
    fn parallel_scan_matches_serial() {
        let b = PBall::new(4, 1.3).unwrap();
        let serial = sections::min_section_scan(&b, 2, 3, 20_000, 9).unwrap();
        for t in [1, 3] {
            let (par, all) = min_section_scan(&pool(Some(t)).unwrap(), &b, 2, 3, 20_000, 9).unwrap();
            assert_eq!(par, serial);
            assert_eq!(all.len(), 5);
        }
    }

    #[test]
    fn parallel_verify_matches_serial() {
        let cfg = VerifyConfig::default();
        let cases: Vec<_> =
            certify::catalog().into_iter().filter(|c| ["P1.1-1", "P1.2", "P2.5-const"].contains(&c.id)).collect();
        let par = verify_cases(&pool(Some(2)).unwrap(), &cases, &cfg);
        for (c, p) in cases.iter().zip(par) {
            let mut s = certify::certify_case(c, &cfg);
            s.stats.elapsed = p.stats.elapsed;
            assert_eq!(p, s);
        }
    }
}
