use rayon::prelude::*;
use serde::Serialize;

use super::{accumulation_points, check_constraints, BieConfig, ClusterReport, Pattern};
use crate::error::{Error, Result};
use crate::scene::{DomainGraph, RegionId, EXTERIOR};

/// Ratios within this relative distance count as a tie.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct Candidate {
    #[serde(skip)]
    pub config: BieConfig,
    pub notation: String,
    pub report: ClusterReport,
}

/// Every admissible configuration: each flip mask of the interior
/// interfaces, then each assignment of P1/P2/P3 (with every usable reference
/// pair) to the regions that own exactly one outward interface.
pub fn enumerate_configs(base: &DomainGraph) -> Vec<BieConfig> {
    let interior: Vec<usize> = (0..base.len())
        .filter(|&b| !base.interfaces()[b].is_exterior())
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << interior.len() {
        let mut cfg = BieConfig::identity(base);
        for (bit, &b) in interior.iter().enumerate() {
            cfg.flips[b] = mask >> bit & 1 == 1;
        }
        let oriented = cfg.oriented(base).expect("only interior interfaces are flipped");
        let tunable: Vec<(RegionId, RegionId)> = (2..=base.num_regions())
            .filter_map(|r| match oriented.outward_positions(r)[..] {
                [b] => Some((r, oriented.interfaces()[b].to)),
                _ => None,
            })
            .collect();
        for subset in 0u64..1 << tunable.len() {
            let chosen = |r: RegionId| {
                tunable
                    .iter()
                    .position(|&(t, _)| t == r)
                    .is_some_and(|i| subset >> i & 1 == 1)
            };
            let options: Vec<(RegionId, Vec<Pattern>)> = tunable
                .iter()
                .enumerate()
                .filter(|(i, _)| subset >> i & 1 == 1)
                .map(|(_, &(r, s))| {
                    let refs: Vec<(RegionId, RegionId)> = oriented
                        .interfaces()
                        .iter()
                        .map(|f| (f.from, f.to))
                        .filter(|&(k, l)| {
                            (k == EXTERIOR || !chosen(k)) && (!chosen(l) || l == r || l == s)
                        })
                        .collect();
                    let pats = refs
                        .iter()
                        .map(|&reference| Pattern::P2 { reference })
                        .chain(refs.iter().map(|&reference| Pattern::P3 { reference }))
                        .collect();
                    (r, pats)
                })
                .collect();
            product(&options, &mut cfg.clone(), 0, &mut |c| {
                if check_constraints(base, c).is_empty() {
                    out.push(c.clone());
                }
            });
        }
    }
    out
}

fn product(
    options: &[(RegionId, Vec<Pattern>)],
    cfg: &mut BieConfig,
    depth: usize,
    emit: &mut dyn FnMut(&BieConfig),
) {
    let Some((r, pats)) = options.get(depth) else {
        emit(cfg);
        return;
    };
    for &p in pats {
        cfg.patterns[r - 1] = p;
        product(options, cfg, depth + 1, emit);
    }
    cfg.patterns[r - 1] = Pattern::P1;
}

/// Cluster report of every enumerated configuration, in enumeration order.
pub fn evaluate_all(base: &DomainGraph) -> Result<Vec<Candidate>> {
    enumerate_configs(base)
        .into_par_iter()
        .map(|config| {
            let report = accumulation_points(base, &config)?;
            let notation = config.to_notation(base)?;
            Ok(Candidate {
                config,
                notation,
                report,
            })
        })
        .collect()
}

/// Index of the preferred candidate: smallest max_ratio, then fewer flips,
/// then P1 over P2 over P3 region by region, then enumeration order.
pub fn select(candidates: &[Candidate]) -> Option<usize> {
    let best = candidates
        .iter()
        .map(|c| c.report.max_ratio)
        .fold(f64::INFINITY, f64::min);
    candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| c.report.max_ratio <= best * (1.0 + TIE_TOL))
        .min_by_key(|(i, c)| {
            let ranks: Vec<u8> = c.config.patterns.iter().map(Pattern::rank).collect();
            (c.config.num_flips(), ranks, *i)
        })
        .map(|(i, _)| i)
}

/// The configuration minimising the largest ratio between accumulation points.
pub fn tune(base: &DomainGraph) -> Result<Candidate> {
    let mut all = evaluate_all(base)?;
    let i = select(&all).ok_or_else(|| Error::Config("no admissible configuration".into()))?;
    Ok(all.swap_remove(i))
}
