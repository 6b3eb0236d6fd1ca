//! Batch front end: ingest groups, kernels and banded lattice operators,
//! run the verification suites and analyses, and emit JSON or CSV reports.
//!
//! Exit codes: 0 all checks pass, 1 check failure, 2 input error,
//! 3 refusal to extract limits from an unstructured tail.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qha::checks::{run_selftest, Check, SelftestConfig};
use qha::error::Error;
use qha::group::FiniteAbelianGroup;
use qha::heisenberg::Cocycle;
use qha::io::{BandedDto, GroupDto, KernelDto};
use qha::limitops::{compactness_diagnostic, limit_operator, LimitOperatorSpec, TailClass};
use qha::opalg::{
    band_support, band_truncate, c1_membership_profile, default_probes, fejer_family,
    fejer_family_dual, fourier_conjugate, oscillation, BandSet, KernelOperator,
};
use qha::propa::{
    build_partition, folner_for, folner_ratio, parse_ratio, probe_box, probe_cross,
    verify_partition,
};

#[derive(Parser)]
#[command(name = "qha", version, about = "Phase-space harmonic analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run every identity suite at the given tolerance.
    Selftest {
        /// Residual tolerance for the numeric checks.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Seed for the randomized suites; fixed seed, identical report.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Cyclic orders of a test group, comma separated (repeatable).
        #[arg(long = "group", value_name = "ORDERS")]
        groups: Vec<String>,
        /// Random trials per randomized check.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Band, oscillation and membership analysis of a kernel operator.
    BandAnalyze {
        /// Kernel JSON file: {"group": {...}, "kernel": [[[re, im], ...], ...]}.
        input: PathBuf,
        /// Relative tolerance for band supports.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Probe powers per generator for the oscillation report.
        #[arg(long, default_value_t = 2)]
        probes: usize,
        /// Stages of the approximate-unit membership profile.
        #[arg(long, default_value_t = 4)]
        stages: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Windowed lattice operators.
    Limitops {
        #[command(subcommand)]
        command: LimitopsCommand,
    },
    /// Folner boxes and the partition-of-unity report.
    Propa {
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Invariance tolerance, exact decimal or fraction (e.g. 0.05, 1/20).
        #[arg(long, default_value = "0.05")]
        eps: String,
        /// Probe set: "box:r" or "cross:r" (radius defaults to 1).
        #[arg(long, default_value = "box:1")]
        probe: String,
        /// Radius of the compact probe for the locality count.
        #[arg(long, default_value_t = 3)]
        locality_radius: i64,
        /// Window radius override (default: box side + probe radius + 1).
        #[arg(long)]
        window: Option<i64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Subcommand)]
enum LimitopsCommand {
    /// Compactness verdict and truncation evidence for a banded operator.
    Analyze {
        /// Banded JSON file: {"d": ..., "N": ..., "diagonals": [...]}.
        input: PathBuf,
        /// Evidence threshold defining n*.
        #[arg(long, default_value_t = 1e-6)]
        threshold: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::UnstructuredTail { .. } | Error::ResidueClassRequired { .. } => 3,
        Error::ConsistencyFailure { .. } => 1,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Selftest {
            tol,
            seed,
            groups,
            trials,
            format,
        } => cmd_selftest(tol, seed, &groups, trials, format),
        Command::BandAnalyze {
            input,
            tol,
            probes,
            stages,
            format,
        } => cmd_band_analyze(&input, tol, probes, stages, format),
        Command::Limitops {
            command:
                LimitopsCommand::Analyze {
                    input,
                    threshold,
                    format,
                },
        } => cmd_limitops_analyze(&input, threshold, format),
        Command::Propa {
            dim,
            eps,
            probe,
            locality_radius,
            window,
            format,
        } => cmd_propa(dim, &eps, &probe, locality_radius, window, format),
    }
}

fn read_file(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// selftest

#[derive(Serialize)]
struct SelftestReport {
    tolerance: f64,
    seed: u64,
    trials: usize,
    groups: Vec<Vec<usize>>,
    pass: bool,
    failed: usize,
    checks: Vec<Check>,
}

fn cmd_selftest(
    tol: f64,
    seed: u64,
    group_args: &[String],
    trials: usize,
    format: Format,
) -> Result<u8, Error> {
    if tol <= 0.0 {
        return Err(Error::InvalidParameter {
            reason: "tolerance must be positive".into(),
        });
    }
    let mut groups = Vec::new();
    for arg in group_args {
        let orders = arg
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad group orders {arg:?}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        groups.push(orders);
    }
    if groups.is_empty() {
        groups = SelftestConfig::default().groups;
    }
    let cfg = SelftestConfig {
        tol,
        seed,
        groups: groups.clone(),
        trials,
    };
    let checks = run_selftest(&cfg)?;
    let failed = checks.iter().filter(|c| !c.pass).count();
    let report = SelftestReport {
        tolerance: tol,
        seed,
        trials,
        groups,
        pass: failed == 0,
        failed,
        checks,
    };
    match format {
        Format::Json => println!("{}", to_json(&report)?),
        Format::Csv => {
            let mut out = String::from("name,group,residual,tol,pass\n");
            for c in &report.checks {
                let _ = writeln!(
                    out,
                    "{},{},{:e},{:e},{}",
                    c.name, c.group, c.residual, c.tol, c.pass
                );
            }
            print!("{out}");
        }
    }
    Ok(if report.pass { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// band-analyze

#[derive(Serialize)]
struct ProbeValue {
    probe: Vec<i64>,
    value: f64,
}

#[derive(Serialize)]
struct OscillationDto {
    group_probes: Vec<ProbeValue>,
    dual_probes: Vec<ProbeValue>,
    osc_group: f64,
    osc_dual: f64,
}

#[derive(Serialize)]
struct TruncationRow {
    radius: i64,
    band_size: usize,
    distance: f64,
}

#[derive(Serialize)]
struct C1StageDto {
    index: usize,
    error: f64,
    error_group: f64,
    error_dual: f64,
}

#[derive(Serialize)]
struct BandAnalyzeReport {
    group: GroupDto,
    band_support: Vec<Vec<i64>>,
    band_support_fourier_side: Vec<Vec<i64>>,
    band_width: i64,
    truncation: Vec<TruncationRow>,
    osc: OscillationDto,
    c1_profile: Vec<C1StageDto>,
}

/// Circular sup-norm ball of the given radius as a band set.
fn ball_band_set(group: &FiniteAbelianGroup, radius: i64) -> BandSet {
    let mut elems = Vec::new();
    for e in group.elements() {
        let dist = e
            .residues()
            .iter()
            .zip(group.orders())
            .map(|(&r, &n)| (r as i64).min(n as i64 - r as i64))
            .max()
            .unwrap_or(0);
        if dist <= radius {
            elems.push(e);
        }
    }
    BandSet::from_elements(group.clone(), &elems)
}

fn circular_width(group: &FiniteAbelianGroup, band: &BandSet) -> i64 {
    band.elements()
        .iter()
        .map(|e| {
            e.residues()
                .iter()
                .zip(group.orders())
                .map(|(&r, &n)| (r as i64).min(n as i64 - r as i64))
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

fn residues_of(band: &BandSet) -> Vec<Vec<i64>> {
    band.elements()
        .iter()
        .map(|e| e.residues().iter().map(|&r| r as i64).collect())
        .collect()
}

fn cmd_band_analyze(
    input: &PathBuf,
    tol: f64,
    probes: usize,
    stages: usize,
    format: Format,
) -> Result<u8, Error> {
    let text = read_file(input)?;
    let dto: KernelDto = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    let a: KernelOperator<f64> = dto.to_operator()?;
    let group = a.group().clone();
    let co = Cocycle::standard(group.clone());

    let band = band_support(&a, tol);
    let fourier_band = band_support(&fourier_conjugate(&a)?, tol);

    // Distance to the nearest band operator along nested circular balls.
    let max_radius = group
        .orders()
        .iter()
        .map(|&n| (n / 2) as i64)
        .max()
        .unwrap_or(0);
    let mut truncation = Vec::new();
    for radius in 0..=max_radius {
        let k = ball_band_set(&group, radius);
        let (_, distance) = band_truncate(&a, &k)?;
        truncation.push(TruncationRow {
            radius,
            band_size: k.len(),
            distance,
        });
    }

    let (probes_g, probes_d) = default_probes(&group, probes.max(1));
    let report = oscillation(&co, &a, &probes_g, &probes_d)?;
    let osc = OscillationDto {
        group_probes: report
            .group_probes
            .iter()
            .map(|(e, v)| ProbeValue {
                probe: e.residues().iter().map(|&r| r as i64).collect(),
                value: *v,
            })
            .collect(),
        dual_probes: report
            .dual_probes
            .iter()
            .map(|(e, v)| ProbeValue {
                probe: e.residues().iter().map(|&r| r as i64).collect(),
                value: *v,
            })
            .collect(),
        osc_group: report.osc_group,
        osc_dual: report.osc_dual,
    };

    let f_family = fejer_family::<f64>(&group, stages.max(1));
    let g_family = fejer_family_dual::<f64>(&group, stages.max(1));
    let profile = c1_membership_profile(&co, &a, &f_family, &g_family)?;

    let report = BandAnalyzeReport {
        group: GroupDto::from_group(&group),
        band_support: residues_of(&band),
        band_support_fourier_side: residues_of(&fourier_band),
        band_width: circular_width(&group, &band),
        truncation,
        osc,
        c1_profile: profile
            .stages
            .iter()
            .map(|s| C1StageDto {
                index: s.index,
                error: s.error,
                error_group: s.error_group,
                error_dual: s.error_dual,
            })
            .collect(),
    };

    match format {
        Format::Json => println!("{}", to_json(&report)?),
        Format::Csv => {
            let mut out = String::new();
            let _ = writeln!(out, "section,key,value");
            for row in &report.truncation {
                let _ = writeln!(
                    out,
                    "truncation,radius={} size={},{:e}",
                    row.radius, row.band_size, row.distance
                );
            }
            for p in &report.osc.group_probes {
                let _ = writeln!(out, "osc_group,{:?},{:e}", p.probe, p.value);
            }
            for p in &report.osc.dual_probes {
                let _ = writeln!(out, "osc_dual,{:?},{:e}", p.probe, p.value);
            }
            for s in &report.c1_profile {
                let _ = writeln!(out, "c1_profile,stage={},{:e}", s.index, s.error);
            }
            print!("{out}");
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// limitops analyze

#[derive(Serialize)]
struct LimitSummary {
    axis: usize,
    positive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    residue: Option<Vec<i64>>,
    is_zero: bool,
}

#[derive(Serialize)]
struct EvidenceRow {
    n: i64,
    sigma_max: f64,
}

#[derive(Serialize)]
struct LimitopsReport {
    d: usize,
    #[serde(rename = "N")]
    radius: i64,
    band_width: i64,
    verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<i64>>,
    threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_star: Option<i64>,
    limit_operators: Vec<LimitSummary>,
    evidence: Vec<EvidenceRow>,
}

fn cmd_limitops_analyze(input: &PathBuf, threshold: f64, format: Format) -> Result<u8, Error> {
    let text = read_file(input)?;
    let dto: BandedDto = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    let b = dto.to_operator()?;

    // An unstructured tail is a refusal for the whole analysis.
    for diag in b.diagonals() {
        if matches!(diag.tail, TailClass::Unstructured) {
            return Err(Error::UnstructuredTail {
                offset: diag.offset.clone(),
            });
        }
    }

    let report = compactness_diagnostic(&b, threshold)?;
    let verdict = match report.verdict {
        qha::limitops::CompactnessVerdict::Compact => "COMPACT",
        qha::limitops::CompactnessVerdict::NotCompact => "NOT_COMPACT",
        qha::limitops::CompactnessVerdict::Undecidable => "UNDECIDABLE",
    };

    // Limit operators per axis direction; periodic tails get one summary
    // per residue class along the escape axis.
    let mut limit_operators = Vec::new();
    for axis in 0..b.dim() {
        let max_period = b
            .diagonals()
            .iter()
            .filter_map(|d| match &d.tail {
                TailClass::Periodic { period } => Some(period[axis] as i64),
                _ => None,
            })
            .max();
        for positive in [true, false] {
            match max_period {
                None => {
                    let spec = LimitOperatorSpec::axis(axis, positive);
                    let lim = limit_operator(&b, &spec)?;
                    limit_operators.push(LimitSummary {
                        axis,
                        positive,
                        residue: None,
                        is_zero: lim.is_zero(b.tail_tol()),
                    });
                }
                Some(p) => {
                    for r in 0..p.min(64) {
                        let mut residue = vec![0i64; b.dim()];
                        residue[axis] = r;
                        let spec =
                            LimitOperatorSpec::residue_class(axis, positive, residue.clone());
                        let lim = limit_operator(&b, &spec)?;
                        limit_operators.push(LimitSummary {
                            axis,
                            positive,
                            residue: Some(residue),
                            is_zero: lim.is_zero(b.tail_tol()),
                        });
                    }
                }
            }
        }
    }

    let out = LimitopsReport {
        d: b.dim(),
        radius: b.radius(),
        band_width: b.band_width(),
        verdict: verdict.into(),
        witness: report.witness.clone(),
        threshold,
        n_star: report.n_star,
        limit_operators,
        evidence: report
            .evidence
            .iter()
            .map(|&(n, sigma)| EvidenceRow { n, sigma_max: sigma })
            .collect(),
    };

    match format {
        Format::Json => println!("{}", to_json(&out)?),
        Format::Csv => {
            let mut s = String::new();
            let _ = writeln!(s, "verdict,{}", out.verdict);
            let _ = writeln!(s, "n,sigma_max");
            for row in &out.evidence {
                let _ = writeln!(s, "{},{:e}", row.n, row.sigma_max);
            }
            print!("{s}");
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// propa

#[derive(Serialize)]
struct RatioDto {
    num: i64,
    den: i64,
    value: f64,
}

impl RatioDto {
    fn from(r: qha::propa::Ratio<i64>) -> Self {
        RatioDto {
            num: *r.numer(),
            den: *r.denom(),
            value: *r.numer() as f64 / *r.denom() as f64,
        }
    }
}

#[derive(Serialize)]
struct ConditionDto {
    pass: bool,
    detail: String,
}

#[derive(Serialize)]
struct InvarianceDto {
    pass: bool,
    max_sum: RatioDto,
    per_probe: Vec<(Vec<i64>, RatioDto)>,
    equals_folner_ratio: bool,
    interior_points: usize,
}

#[derive(Serialize)]
struct LocalityDto {
    pass: bool,
    probe_radius: i64,
    count: usize,
    expected: usize,
}

#[derive(Serialize)]
struct ChecksDto {
    i: ConditionDto,
    ii: ConditionDto,
    iii: InvarianceDto,
    iv: LocalityDto,
}

#[derive(Serialize)]
struct PropaReport {
    dim: usize,
    eps: RatioDto,
    probe: Vec<Vec<i64>>,
    #[serde(rename = "N")]
    box_side: i64,
    box_dims: Vec<i64>,
    ratio: RatioDto,
    window_radius: i64,
    checks: ChecksDto,
    pass: bool,
}

fn parse_probe(spec: &str, dim: usize) -> Result<Vec<Vec<i64>>, Error> {
    let (kind, radius) = match spec.split_once(':') {
        Some((k, r)) => (
            k,
            r.parse::<i64>()
                .map_err(|e| Error::Parse(format!("bad probe radius in {spec:?}: {e}")))?,
        ),
        None => (spec, 1),
    };
    if radius < 0 {
        return Err(Error::Parse(format!(
            "probe radius must be >= 0 in {spec:?}"
        )));
    }
    match kind {
        "box" => Ok(probe_box(dim, radius)),
        "cross" => Ok(probe_cross(dim, radius)),
        other => Err(Error::Parse(format!(
            "unknown probe kind {other:?} (expected box or cross)"
        ))),
    }
}

fn cmd_propa(
    dim: usize,
    eps_str: &str,
    probe_spec: &str,
    locality_radius: i64,
    window: Option<i64>,
    format: Format,
) -> Result<u8, Error> {
    let eps = parse_ratio(eps_str)?;
    let probe = parse_probe(probe_spec, dim)?;
    let folner = folner_for(eps, &probe, dim)?;
    let probe_radius = probe
        .iter()
        .flat_map(|h| h.iter().map(|v| v.abs()))
        .max()
        .unwrap_or(0);
    let box_side = *folner.dims().iter().max().unwrap();
    let window_radius = window.unwrap_or(box_side + probe_radius + 1);
    let partition = build_partition(&folner, window_radius)?;
    let report = verify_partition(&partition, &probe, eps, locality_radius)?;

    let mut worst = qha::propa::Ratio::new(0i64, 1);
    for h in &probe {
        let r = folner_ratio(&folner, h)?;
        if r > worst {
            worst = r;
        }
    }

    let out = PropaReport {
        dim,
        eps: RatioDto::from(eps),
        probe: probe.clone(),
        box_side,
        box_dims: folner.dims().to_vec(),
        ratio: RatioDto::from(worst),
        window_radius,
        checks: ChecksDto {
            i: ConditionDto {
                pass: report.partition_exact.pass,
                detail: report.partition_exact.detail.clone(),
            },
            ii: ConditionDto {
                pass: report.supports_compact.pass,
                detail: report.supports_compact.detail.clone(),
            },
            iii: InvarianceDto {
                pass: report.almost_invariance.pass,
                max_sum: RatioDto::from(report.almost_invariance.max_sum),
                per_probe: report
                    .almost_invariance
                    .per_probe
                    .iter()
                    .map(|(h, v)| (h.clone(), RatioDto::from(*v)))
                    .collect(),
                equals_folner_ratio: report.almost_invariance.equals_folner_ratio,
                interior_points: report.almost_invariance.interior_points,
            },
            iv: LocalityDto {
                pass: report.locality.pass,
                probe_radius: locality_radius,
                count: report.locality.count,
                expected: report.locality.expected,
            },
        },
        pass: report.pass,
    };

    match format {
        Format::Json => println!("{}", to_json(&out)?),
        Format::Csv => {
            let mut s = String::new();
            let _ = writeln!(s, "key,value");
            let _ = writeln!(s, "N,{}", out.box_side);
            let _ = writeln!(s, "ratio,{}/{}", out.ratio.num, out.ratio.den);
            let _ = writeln!(s, "check_i,{}", out.checks.i.pass);
            let _ = writeln!(s, "check_ii,{}", out.checks.ii.pass);
            let _ = writeln!(s, "check_iii,{}", out.checks.iii.pass);
            let _ = writeln!(s, "check_iv,{}", out.checks.iv.pass);
            print!("{s}");
        }
    }
    Ok(if report.pass { 0 } else { 1 })
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Error> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))
}
