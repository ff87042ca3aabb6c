use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::montecarlo::{
    exact_expected_success, run_mc, with_workers, McProtocol, NoiseSpec, Seed, SlazNoise, TrialStats,
};
use crate::protocols::{improved_c0, slaz_p1, Protocol};

use super::SweepRow;

/// Module transmissions plotted in the `C0(M)` figure.
pub const FIG3_T_VALUES: [f64; 4] = [1e-3, 5e-4, 1e-4, 5e-5];

/// Dense `C0` grid, one row per `(t, M)`.
pub fn sweep_c0(t_values: &[f64], m_range: RangeInclusive<usize>) -> Result<Vec<SweepRow>> {
    if t_values.is_empty() || m_range.is_empty() {
        return Err(Error::Config("C0 sweep needs at least one t and one M".into()));
    }
    let mut rows = Vec::with_capacity(t_values.len() * m_range.clone().count());
    for &t in t_values {
        for m in m_range.clone() {
            let mut row = SweepRow::new(Protocol::Improved, m, improved_c0(m, t)?);
            row.t = Some(t);
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Shape checks on a `C0` sweep: each curve non-increasing in `M`, and at
/// every `M` a smaller `t` never lies below a larger one.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Fig3Report {
    /// `(t, M)` where `C0(M) > C0(M - 1)`.
    pub rising: Vec<(f64, usize)>,
    /// `(M, smaller t, larger t)` where the smaller-t curve is below.
    pub misordered: Vec<(usize, f64, f64)>,
}

impl Fig3Report {
    pub fn check(rows: &[SweepRow]) -> Self {
        let mut report = Self::default();
        let mut ts: Vec<f64> = rows.iter().filter_map(|r| r.t).collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        let curve = |t: f64| {
            let mut pts: Vec<(usize, f64)> = rows.iter().filter(|r| r.t == Some(t)).map(|r| (r.m, r.value)).collect();
            pts.sort_by_key(|p| p.0);
            pts
        };
        for &t in &ts {
            for w in curve(t).windows(2) {
                if w[1].1 > w[0].1 {
                    report.rising.push((t, w[1].0));
                }
            }
        }
        for pair in ts.windows(2) {
            let (small, large) = (curve(pair[0]), curve(pair[1]));
            for &(m, v_small) in &small {
                if let Some(&(_, v_large)) = large.iter().find(|p| p.0 == m) {
                    if v_small < v_large {
                        report.misordered.push((m, pair[0], pair[1]));
                    }
                }
            }
        }
        report
    }

    pub fn passed(&self) -> bool {
        self.rising.is_empty() && self.misordered.is_empty()
    }
}

/// Noise grid `B = 0, 0.05, ..., 1`.
pub fn default_noise_grid() -> Vec<f64> {
    (0..=20).map(|k| k as f64 / 20.0).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSweepConfig {
    pub b_grid: Vec<f64>,
    pub trials: usize,
    pub seed: Seed,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    pub c: f64,
    pub granularity: SlazNoise,
    pub improved_cycles: Vec<usize>,
    pub slaz_cycles: Vec<(usize, usize)>,
}

impl NoiseSweepConfig {
    /// Robustness study setup: improved `M = 25, 50` with `c = 0`, baseline
    /// `(M, N) = (25, 320), (50, 1250)`, 2000 trials.
    pub fn standard(seed: u64) -> Self {
        Self {
            b_grid: default_noise_grid(),
            trials: 2000,
            seed: Seed(seed),
            workers: None,
            c: 0.0,
            granularity: SlazNoise::default(),
            improved_cycles: vec![25, 50],
            slaz_cycles: vec![(25, 320), (50, 1250)],
        }
    }

    fn protocols(&self) -> Result<Vec<McProtocol>> {
        let mut out = Vec::new();
        for &m in &self.improved_cycles {
            out.push(McProtocol::improved(m)?);
        }
        for &(m, n) in &self.slaz_cycles {
            out.push(McProtocol::slaz(m, n)?);
        }
        Ok(out)
    }
}

/// Sampled mean against the exact noise average at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub protocol: Protocol,
    pub m: usize,
    pub n: Option<usize>,
    pub b: f64,
    pub stats: TrialStats,
    pub exact: f64,
}

impl OracleCheck {
    /// Absolute slack added to the `4 stderr` band for zero-variance points,
    /// where both sides are the same deterministic value up to rounding.
    pub const ROUNDING_SLACK: f64 = 1e-12;

    pub fn passed(&self) -> bool {
        (self.stats.mean - self.exact).abs() <= 4.0 * self.stats.stderr + Self::ROUNDING_SLACK
    }
}

/// A pointwise comparison `lhs >= rhs` (or `lhs == rhs` within tolerance for
/// pinned endpoints).
#[derive(Debug, Clone, PartialEq)]
pub struct ClaimCheck {
    pub label: String,
    pub b: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Fig4Report {
    pub oracle: Vec<OracleCheck>,
    /// Endpoint values that must match to `1e-12`.
    pub pins: Vec<ClaimCheck>,
    /// Ordering claims between curves, evaluated on the sampled means.
    pub claims: Vec<ClaimCheck>,
}

impl Fig4Report {
    pub fn tolerances_ok(&self) -> bool {
        self.oracle.iter().all(OracleCheck::passed) && self.pins.iter().all(|p| p.holds)
    }

    pub fn claims_ok(&self) -> bool {
        self.claims.iter().all(|c| c.holds)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSweep {
    pub rows: Vec<SweepRow>,
    pub report: Fig4Report,
}

/// One protocol's `(B, sampled stats, exact value)` points.
type Curve = (McProtocol, Vec<(f64, TrialStats, f64)>);

fn build_report(curves: &[Curve], c: f64) -> Fig4Report {
    let mut report = Fig4Report::default();
    for (protocol, points) in curves {
        for &(b, stats, exact) in points {
            report.oracle.push(OracleCheck {
                protocol: protocol.protocol(),
                m: protocol.outer_cycles(),
                n: protocol.inner_cycles(),
                b,
                stats,
                exact,
            });
        }
    }

    let pin = |label: String, b: f64, lhs: f64, rhs: f64| ClaimCheck {
        holds: (lhs - rhs).abs() <= 1e-12,
        label,
        b,
        lhs,
        rhs,
    };
    for (protocol, points) in curves {
        let m = protocol.outer_cycles();
        for &(b, stats, _) in points {
            match protocol {
                McProtocol::Improved(_) if b == 0.0 => {
                    report
                        .pins
                        .push(pin(format!("improved M={m} clean"), b, stats.mean, 1.0))
                }
                McProtocol::Improved(_) if b == 1.0 && c == 0.0 => {
                    report
                        .pins
                        .push(pin(format!("improved M={m} fully blocked"), b, stats.mean, 0.0))
                }
                McProtocol::Slaz(p) if b == 0.0 => report.pins.push(pin(
                    format!("slaz M={m}/N={} clean", p.inner_cycles()),
                    b,
                    stats.mean,
                    slaz_p1(m).expect("M >= 1"),
                )),
                _ => {}
            }
        }
    }

    let improved: Vec<_> = curves
        .iter()
        .filter(|(p, _)| matches!(p, McProtocol::Improved(_)))
        .collect();
    for (imp, imp_pts) in &improved {
        let m = imp.outer_cycles();
        for (slaz, slaz_pts) in curves
            .iter()
            .filter(|(p, _)| matches!(p, McProtocol::Slaz(_)) && p.outer_cycles() == m)
        {
            let label = format!("improved M={m} >= slaz M={m}/N={}", slaz.inner_cycles().unwrap_or(0));
            for (a, s) in imp_pts.iter().zip(slaz_pts) {
                report.claims.push(ClaimCheck {
                    label: label.clone(),
                    b: a.0,
                    lhs: a.1.mean,
                    rhs: s.1.mean,
                    holds: a.1.mean >= s.1.mean,
                });
            }
        }
        for (other, other_pts) in improved.iter().filter(|(p, _)| p.outer_cycles() > m) {
            let label = format!("improved M={m} >= improved M={}", other.outer_cycles());
            for (a, o) in imp_pts.iter().zip(other_pts.iter()).filter(|(a, _)| a.0 > 0.0) {
                report.claims.push(ClaimCheck {
                    label: label.clone(),
                    b: a.0,
                    lhs: a.1.mean,
                    rhs: o.1.mean,
                    holds: a.1.mean >= o.1.mean,
                });
            }
        }
    }
    report
}

/// Sampled and exact success rates over the noise grid for every configured
/// protocol, plus the regression report.
pub fn sweep_noise(config: &NoiseSweepConfig) -> Result<NoiseSweep> {
    if config.b_grid.is_empty() {
        return Err(Error::Config("noise grid is empty".into()));
    }
    if config.trials == 0 {
        return Err(Error::Config("trial count must be at least 1".into()));
    }
    let protocols = config.protocols()?;
    let curves = with_workers(config.workers, || {
        protocols
            .into_iter()
            .map(|protocol| {
                let points = config
                    .b_grid
                    .iter()
                    .map(|&b| {
                        let spec = NoiseSpec::new(b, config.c)?.with_granularity(config.granularity);
                        let stats = run_mc(&protocol, &spec, config.trials, config.seed)?;
                        Ok((b, stats, exact_expected_success(&protocol, &spec)))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((protocol, points))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut rows = Vec::new();
    for (protocol, points) in &curves {
        for &(b, stats, exact) in points {
            let mut base = SweepRow::new(protocol.protocol(), protocol.outer_cycles(), exact);
            base.n = protocol.inner_cycles();
            base.b = Some(b);
            if let McProtocol::Improved(_) = protocol {
                base.c = Some(config.c);
            }
            let mut sampled = base.clone();
            sampled.value = stats.mean;
            sampled.trials = Some(config.trials);
            sampled.seed = Some(config.seed.0);
            sampled.stderr = Some(stats.stderr);
            rows.push(base);
            rows.push(sampled);
        }
    }
    Ok(NoiseSweep {
        report: build_report(&curves, config.c),
        rows,
    })
}
