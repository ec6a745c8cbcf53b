//! Design-space sweeps over the scalable architectures: Pareto fronts of
//! cycles against one resource axis, normalized-runtime tables, and frame
//! rates for block-partitioned images.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{cost, cycles, ArchConfig, CostReport, Method};
use crate::error::{Error, Result};

/// The resource traded against cycles in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum ResourceAxis {
    FlipFlops,
    OneBitAdds,
    Multipliers,
    MemoryBits,
}

impl ResourceAxis {
    pub const ALL: [ResourceAxis; 4] = [
        ResourceAxis::FlipFlops,
        ResourceAxis::OneBitAdds,
        ResourceAxis::Multipliers,
        ResourceAxis::MemoryBits,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ResourceAxis::FlipFlops => "flipflops",
            ResourceAxis::OneBitAdds => "adds",
            ResourceAxis::Multipliers => "multipliers",
            ResourceAxis::MemoryBits => "memory",
        }
    }

    pub fn from_name(name: &str) -> Option<ResourceAxis> {
        ResourceAxis::ALL.into_iter().find(|a| a.name() == name)
    }

    pub fn value(&self, report: &CostReport) -> u64 {
        match self {
            ResourceAxis::FlipFlops => report.flipflops,
            ResourceAxis::OneBitAdds => report.onebit_adds,
            ResourceAxis::Multipliers => report.multipliers,
            ResourceAxis::MemoryBits => report.memory_bits,
        }
    }
}

impl core::fmt::Display for ResourceAxis {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// One non-dominated configuration in a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ParetoPoint {
    pub config: ArchConfig,
    pub cycles: u64,
    pub resource: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn divisors(x: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= x {
        if x % d == 0 {
            out.push(d);
            if d != x / d {
                out.push(x / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

/// Every lawful parallelism setting of the scalable methods, derived from
/// the base configuration.
fn sweep_candidates(base: &ArchConfig) -> Result<Vec<ArchConfig>> {
    base.validate()?;
    match base.method {
        Method::FastScaleConv => {
            // J must divide N + 1; the transform parallelism H tracks J,
            // saturating at the full N rows on the terminal J = N + 1.
            Ok(divisors(base.n + 1)
                .into_iter()
                .map(|j| {
                    let mut cfg = *base;
                    cfg.j = j;
                    cfg.h = j.min(base.n);
                    cfg
                })
                .collect())
        }
        Method::FastRankConv => {
            // Each pass streams P columns and then N output columns, so J
            // must divide into both cleanly or idle: lawful settings are
            // the divisors of gcd(P, N) plus the fully-parallel J = N.
            let mut js = divisors(gcd(base.p, base.n));
            if !js.contains(&base.n) {
                js.push(base.n);
            }
            Ok(js
                .into_iter()
                .map(|j| {
                    let mut cfg = *base;
                    cfg.j = j;
                    cfg
                })
                .collect())
        }
        other => Err(Error::InvalidConfig(format!(
            "Pareto sweeps cover the scalable methods (fastscaleconv, fastrankconv), not {other}",
        ))),
    }
}

/// Sweeps the parallelism of a scalable configuration and returns the
/// non-dominated (cycles, resource) points, slowest first.
pub fn pareto_front(base: &ArchConfig, axis: ResourceAxis) -> Result<Vec<ParetoPoint>> {
    let mut points = Vec::new();
    for cfg in sweep_candidates(base)? {
        let report = cost(&cfg)?;
        points.push(ParetoPoint { config: cfg, cycles: report.cycles, resource: axis.value(&report) });
    }
    let dominated = |a: &ParetoPoint, b: &ParetoPoint| {
        b.cycles <= a.cycles
            && b.resource <= a.resource
            && (b.cycles < a.cycles || b.resource < a.resource)
    };
    let mut front: Vec<ParetoPoint> = points
        .iter()
        .filter(|a| !points.iter().any(|b| dominated(a, b)))
        .copied()
        .collect();
    front.sort_by(|a, b| b.cycles.cmp(&a.cycles).then(a.resource.cmp(&b.resource)));
    front.dedup_by(|a, b| a.cycles == b.cycles && a.resource == b.resource);
    Ok(front)
}

/// One row of a normalized-runtime comparison.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RuntimeRow {
    pub config: ArchConfig,
    pub cycles: u64,
    /// Cycles per output row: `cycles / N`.
    pub normalized: f64,
}

/// Normalized runtimes for the configurations that validated, plus the
/// ones that did not and why.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RuntimeTable {
    pub rows: Vec<RuntimeRow>,
    pub skipped: Vec<(ArchConfig, String)>,
}

/// Evaluates `cycles / N` for each configuration, preserving order;
/// invalid configurations are reported in `skipped` rather than failing
/// the whole table.
pub fn normalized_runtime_table(configs: &[ArchConfig]) -> RuntimeTable {
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for cfg in configs {
        match cycles(cfg) {
            Ok(c) => rows.push(RuntimeRow {
                config: *cfg,
                cycles: c,
                normalized: c as f64 / cfg.n as f64,
            }),
            Err(e) => skipped.push((*cfg, format!("{e}"))),
        }
    }
    RuntimeTable { rows, skipped }
}

/// Frames per second for an image processed in `P x P` blocks at the given
/// clock: the block count is `ceil(rows/P) * ceil(cols/P)` and every block
/// costs one full pipeline pass.
pub fn fps_estimate(image_rows: u64, image_cols: u64, cfg: &ArchConfig, clock_hz: f64) -> Result<f64> {
    if image_rows == 0 || image_cols == 0 {
        return Err(Error::InvalidConfig(String::from("image dimensions must be positive")));
    }
    if !(clock_hz > 0.0) {
        return Err(Error::InvalidConfig(String::from("clock rate must be positive")));
    }
    let per_block = cycles(cfg)?;
    let blocks = image_rows.div_ceil(cfg.p) * image_cols.div_ceil(cfg.p);
    Ok(clock_hz / (blocks as f64 * per_block as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalable_transform_front_covers_every_divisor() {
        let base = ArchConfig::fast_scale_conv(127, 2, 2);
        let front = pareto_front(&base, ResourceAxis::FlipFlops).unwrap();
        let js: Vec<u64> = front.iter().map(|pt| pt.config.j).collect();
        assert_eq!(js, [1, 2, 4, 8, 16, 32, 64, 128]);
        let cycle_counts: Vec<u64> = front.iter().map(|pt| pt.cycles).collect();
        assert_eq!(cycle_counts, [49696, 25383, 13097, 6955, 3885, 2351, 1585, 1199]);
        // Slowest first, strictly cheaper as it slows down.
        for pair in front.windows(2) {
            assert!(pair[0].cycles > pair[1].cycles);
            assert!(pair[0].resource < pair[1].resource);
        }
        // H tracks J until the terminal fully-parallel point.
        assert_eq!(front[0].config.h, 1);
        assert_eq!(front.last().unwrap().config.h, 127);
        assert_eq!(front.last().unwrap().config.j, 128);
        assert_eq!(front[0].resource, 14_979);
        assert_eq!(front.last().unwrap().resource, 1_721_217);
    }

    #[test]
    fn rank_pipeline_front_is_the_coprime_pair() {
        // gcd(64, 127) = 1, so the only lawful settings are J = 1 and the
        // fully-parallel J = N.
        let base = ArchConfig::fast_rank_conv(64, 1, 2);
        let front = pareto_front(&base, ResourceAxis::OneBitAdds).unwrap();
        assert_eq!(front.len(), 2);
        assert_eq!((front[0].config.j, front[0].cycles), (1, 48_903));
        assert_eq!((front[1].config.j, front[1].cycles), (127, 1023));
        assert!(front[0].resource < front[1].resource);
    }

    #[test]
    fn degenerate_axis_collapses_to_the_fastest_point() {
        // Memory does not vary with J, so everything except the fastest
        // configuration is dominated.
        let base = ArchConfig::fast_scale_conv(127, 2, 2);
        let front = pareto_front(&base, ResourceAxis::MemoryBits).unwrap();
        assert_eq!(front.len(), 1);
        assert_eq!(front[0].config.j, 128);
        assert_eq!(front[0].cycles, 1199);
        assert_eq!(front[0].resource, 585_216);
    }

    #[test]
    fn sweeps_reject_fixed_architectures() {
        let err = pareto_front(&ArchConfig::ser_sys(64), ResourceAxis::FlipFlops).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(msg) if msg.contains("scalable")));
    }

    #[test]
    fn normalized_runtimes_match_the_comparison_table() {
        let table = normalized_runtime_table(&[
            ArchConfig::fast_conv(127),
            ArchConfig::ser_sys(64),
            ArchConfig::sca_sys(64, 16, 4),
            ArchConfig::sli_win(64),
            ArchConfig::fftr2(128, 4),
        ]);
        assert!(table.skipped.is_empty());
        let norm: Vec<f64> = table.rows.iter().map(|r| r.normalized).collect();
        assert!((norm[0] - 6.41).abs() < 0.01, "fastconv {}", norm[0]);
        assert!((norm[1] - 128.0).abs() < 0.05, "sersys {}", norm[1]);
        assert!((norm[2] - 8.31).abs() < 0.01, "scasys {}", norm[2]);
        assert!((norm[3] - 191.1).abs() < 0.05, "sliwin {}", norm[3]);
        assert!((norm[4] - 161.0).abs() < 1e-9, "fftr2 {}", norm[4]);
    }

    #[test]
    fn invalid_rows_are_skipped_with_a_reason() {
        let table = normalized_runtime_table(&[
            ArchConfig::fast_conv(127),
            ArchConfig::fast_scale_conv(127, 3, 4),
        ]);
        assert_eq!(table.rows.len(), 1);
        assert_eq!(table.skipped.len(), 1);
        assert!(table.skipped[0].1.contains("divide N + 1"));
    }

    #[test]
    fn frame_rate_for_block_partitioned_video() {
        // 512 x 640 frames in 19 x 19 blocks on the N = 37 scalable
        // pipeline with J = H = 2 at 110 MHz.
        let cfg = ArchConfig::fast_scale_conv(37, 2, 2);
        assert_eq!(cfg.p, 19);
        assert_eq!(super::super::cycles(&cfg).unwrap(), 2430);
        let fps = fps_estimate(512, 640, &cfg, 110.0e6).unwrap();
        let blocks = (512u64.div_ceil(19) * 640u64.div_ceil(19)) as f64;
        assert_eq!(blocks, 918.0);
        assert!((fps - 110.0e6 / (blocks * 2430.0)).abs() < 1e-9);
        assert!((fps - 49.31).abs() < 0.01, "{fps}");
        let frame_ms = 1000.0 / fps;
        assert!((frame_ms - 20.28).abs() < 0.01, "{frame_ms}");
    }

    #[test]
    fn fps_rejects_degenerate_inputs() {
        let cfg = ArchConfig::fast_scale_conv(37, 2, 2);
        assert!(fps_estimate(0, 640, &cfg, 110.0e6).is_err());
        assert!(fps_estimate(512, 640, &cfg, 0.0).is_err());
    }
}
