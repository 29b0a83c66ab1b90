use std::fmt::Write as _;

use serde::Serialize;
use serde_json::json;

use bell_hierarchy::inequality::{
    build_hierarchy_inequality, serialize_expression, BellExpression, ExpressionFormat,
};
use bell_hierarchy::lhv::{certify_m_local_bound, max_strategy_lhs};
use bell_hierarchy::quantum::{evaluate_lhs, MeasurementAngles, NoisyState, StateFamily};
use bell_hierarchy::search::{
    find_threshold, format_significant, reproduce_table, write_table, OptimizerConfig, TableFormat,
    ThresholdResult, ViolationSearch, DEFAULT_BISECTION_TOLERANCE,
};
use bell_hierarchy::Error;

use crate::output::{emit, Format};
use crate::{ExprArgs, Failure, OptimizerArgs, Run};

fn sig(x: f64) -> String {
    format_significant(x, 12)
}

fn join(xs: &[f64], sep: &str) -> String {
    xs.iter().map(|&x| sig(x)).collect::<Vec<_>>().join(sep)
}

fn required<T>(value: Option<T>, flag: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::usage(format!("missing --{flag}")))
}

fn csv_bytes<S: Serialize>(rows: &[S]) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Failure::io(e.to_string()))?;
    }
    w.into_inner().map_err(|e| Failure::io(e.to_string()))
}

fn json_bytes<S: Serialize>(value: &S) -> Result<Vec<u8>, Failure> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Failure::io(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn expression(run: &Run, args: &ExprArgs) -> Result<BellExpression, Failure> {
    let n = required(run.file.pick(args.n, "n")?, "n")?;
    let m = required(run.file.pick(args.m, "m")?, "m")?;
    let k_prime = run.file.pick(args.k_prime, "k-prime")?.unwrap_or(1);
    Ok(build_hierarchy_inequality(n, m, k_prime)?)
}

fn family(run: &Run, flag: Option<StateFamily>) -> Result<StateFamily, Failure> {
    required(run.file.pick(flag, "family")?, "family")
}

fn optimizer(run: &Run, args: &OptimizerArgs) -> Result<OptimizerConfig, Failure> {
    let d = OptimizerConfig::default();
    let f = &run.file;
    let config = OptimizerConfig {
        grid_resolution: f
            .pick(args.grid_resolution, "grid-resolution")?
            .unwrap_or(d.grid_resolution),
        refinement_rounds: f
            .pick(args.refinement_rounds, "refinement-rounds")?
            .unwrap_or(d.refinement_rounds),
        local_tolerance: f
            .pick(args.local_tolerance, "local-tolerance")?
            .unwrap_or(d.local_tolerance),
        restarts: f.pick(args.restarts, "restarts")?.unwrap_or(d.restarts),
        rng_seed: run.seed,
    };
    config.validate()?;
    Ok(config)
}

fn tolerance(run: &Run, flag: Option<f64>) -> Result<f64, Failure> {
    let t = run
        .file
        .pick(flag, "tolerance")?
        .unwrap_or(DEFAULT_BISECTION_TOLERANCE);
    if !(t > 0.0 && t < 1.0) {
        return Err(Failure::usage("--tolerance must lie in (0, 1)"));
    }
    Ok(t)
}

pub fn build(run: &Run, args: &ExprArgs) -> Result<u8, Failure> {
    let expr = expression(run, args)?;
    let bytes = match run.format.unwrap_or(Format::Text) {
        Format::Text => serialize_expression(&expr, ExpressionFormat::Text),
        Format::Structured => serialize_expression(&expr, ExpressionFormat::Structured),
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                coefficient: i8,
                settings: String,
                outcomes: String,
            }
            let rows: Vec<Row> = expr
                .terms()
                .iter()
                .map(|t| Row {
                    coefficient: t.coefficient(),
                    settings: t.settings_string(),
                    outcomes: t.outcomes_string(),
                })
                .collect();
            csv_bytes(&rows)?
        }
    };
    emit(&bytes, run.output.as_deref())?;
    Ok(0)
}

/// Explicit angle lists: one value is shared by all parties.
fn explicit_angles(n: usize, a: Vec<f64>, b: Vec<f64>) -> Result<MeasurementAngles, Failure> {
    let widen = |v: Vec<f64>, name: &str| match v.len() {
        1 => Ok(vec![v[0]; n]),
        len if len == n => Ok(v),
        len => Err(Failure::usage(format!(
            "--{name} needs 1 or {n} values, got {len}"
        ))),
    };
    Ok(MeasurementAngles::new(
        widen(a, "theta-a")?,
        widen(b, "theta-b")?,
    )?)
}

#[allow(clippy::too_many_arguments)]
pub fn evaluate(
    run: &Run,
    args: &ExprArgs,
    family_flag: Option<StateFamily>,
    p: Option<f64>,
    theta_a: Vec<f64>,
    theta_b: Vec<f64>,
    optimizer_args: &OptimizerArgs,
) -> Result<u8, Failure> {
    let expr = expression(run, args)?;
    let family = family(run, family_flag)?;
    let p = run.file.pick(p, "p")?.unwrap_or(1.0);
    let theta_a = run.file.pick_list(theta_a, "theta-a")?;
    let theta_b = run.file.pick_list(theta_b, "theta-b")?;
    let state = NoisyState::new(family.state(expr.n())?, p)?;

    let optimized = theta_a.is_empty() && theta_b.is_empty();
    let angles = if optimized {
        let config = optimizer(run, optimizer_args)?;
        ViolationSearch::run(&expr, state.psi(), &config, true)?.angles()?
    } else if theta_a.is_empty() || theta_b.is_empty() {
        return Err(Failure::usage(
            "give both --theta-a and --theta-b, or neither",
        ));
    } else {
        explicit_angles(expr.n(), theta_a, theta_b)?
    };
    let lhs = evaluate_lhs(&expr, &state, &angles)?;

    let bytes = match run.format.unwrap_or(Format::Text) {
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "# bellh evaluate family={family} n={} m={} k_prime={} p={} angles={} seed={}",
                expr.n(),
                expr.m(),
                expr.k_prime(),
                sig(p),
                if optimized { "optimized" } else { "explicit" },
                run.seed
            );
            let _ = writeln!(s, "lhs {}", sig(lhs));
            let _ = writeln!(s, "theta_a {}", join(angles.theta_a(), ","));
            let _ = writeln!(s, "theta_b {}", join(angles.theta_b(), ","));
            s.into_bytes()
        }
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                family: String,
                n: usize,
                m: usize,
                k_prime: usize,
                p: String,
                lhs: String,
                theta_a: String,
                theta_b: String,
                optimized: bool,
                seed: u64,
            }
            csv_bytes(&[Row {
                family: family.to_string(),
                n: expr.n(),
                m: expr.m(),
                k_prime: expr.k_prime(),
                p: sig(p),
                lhs: sig(lhs),
                theta_a: join(angles.theta_a(), ";"),
                theta_b: join(angles.theta_b(), ";"),
                optimized,
                seed: run.seed,
            }])?
        }
        Format::Structured => json_bytes(&json!({
            "family": family,
            "n": expr.n(),
            "m": expr.m(),
            "k_prime": expr.k_prime(),
            "p": p,
            "lhs": lhs,
            "theta_a": angles.theta_a(),
            "theta_b": angles.theta_b(),
            "optimized": optimized,
            "seed": run.seed,
        }))?,
    };
    emit(&bytes, run.output.as_deref())?;
    Ok(0)
}

pub fn certify(run: &Run, args: &ExprArgs, samples: Option<u64>) -> Result<u8, Failure> {
    let expr = expression(run, args)?;
    let samples = run.file.pick(samples, "samples")?.unwrap_or(10_000);
    let (deterministic_max, argmax) = max_strategy_lhs(&expr)?;
    let report = certify_m_local_bound(&expr, samples, run.seed)?;
    let passed = deterministic_max <= 0 && report.passed();
    let strategy: String = (0..expr.n())
        .map(|k| {
            use bell_hierarchy::inequality::Setting;
            format!(
                "{}{}",
                argmax.outcome(k, Setting::A).as_char(),
                argmax.outcome(k, Setting::B).as_char()
            )
        })
        .collect::<Vec<_>>()
        .join(" ");

    let bytes = match run.format.unwrap_or(Format::Text) {
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "# bellh certify n={} m={} k_prime={} samples={samples} seed={}",
                expr.n(),
                expr.m(),
                expr.k_prime(),
                run.seed
            );
            let _ = writeln!(s, "deterministic_max {deterministic_max}");
            let _ = writeln!(s, "deterministic_argmax {strategy}");
            let _ = writeln!(s, "sampled_max_lhs {}", sig(report.max_lhs));
            let _ = writeln!(s, "sampled_argmax {}", report.argmax);
            let _ = writeln!(s, "failures {}", report.failures.len());
            let _ = writeln!(s, "result {}", if passed { "PASS" } else { "FAIL" });
            for f in &report.failures {
                let _ = writeln!(
                    s,
                    "failure {}",
                    serde_json::to_string(f).map_err(|e| Failure::io(e.to_string()))?
                );
            }
            s.into_bytes()
        }
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                n: usize,
                m: usize,
                k_prime: usize,
                samples: u64,
                seed: u64,
                deterministic_max: i64,
                sampled_max_lhs: String,
                failures: usize,
                passed: bool,
            }
            csv_bytes(&[Row {
                n: expr.n(),
                m: expr.m(),
                k_prime: expr.k_prime(),
                samples,
                seed: run.seed,
                deterministic_max,
                sampled_max_lhs: sig(report.max_lhs),
                failures: report.failures.len(),
                passed,
            }])?
        }
        Format::Structured => json_bytes(&json!({
            "deterministic_max": deterministic_max,
            "deterministic_argmax": strategy,
            "passed": passed,
            "report": report,
        }))?,
    };
    emit(&bytes, run.output.as_deref())?;
    if passed {
        Ok(0)
    } else {
        eprintln!("bellh: bound exceeded");
        Ok(1)
    }
}

fn threshold_text(
    results: &[ThresholdResult],
    family: StateFamily,
    run: &Run,
    tol: f64,
) -> Vec<u8> {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# bellh thresholds family={family} tolerance={} seed={}",
        sig(tol),
        run.seed
    );
    let mut rows: Vec<(usize, Vec<&ThresholdResult>)> = Vec::new();
    for r in results {
        match rows.last_mut() {
            Some((n, cells)) if *n == r.n => cells.push(r),
            _ => rows.push((r.n, vec![r])),
        }
    }
    for (n, cells) in rows {
        let cols: Vec<String> = cells
            .iter()
            .map(|r| format!("p_{}={}", r.i, sig(r.p_threshold)))
            .collect();
        let _ = writeln!(s, "n={n} {}", cols.join(" "));
    }
    s.into_bytes()
}

fn emit_thresholds(
    run: &Run,
    results: &[ThresholdResult],
    family: StateFamily,
    tol: f64,
) -> Result<(), Failure> {
    let bytes = match run.format.unwrap_or(Format::Csv) {
        Format::Text => threshold_text(results, family, run, tol),
        Format::Csv => {
            let mut buf = Vec::new();
            write_table(results, TableFormat::Csv, &mut buf)?;
            buf
        }
        Format::Structured => {
            let mut buf = Vec::new();
            write_table(results, TableFormat::Structured, &mut buf)?;
            buf
        }
    };
    emit(&bytes, run.output.as_deref())
}

pub fn threshold(
    run: &Run,
    n: Option<usize>,
    m: Option<usize>,
    family_flag: Option<StateFamily>,
    tol: Option<f64>,
    optimizer_args: &OptimizerArgs,
) -> Result<u8, Failure> {
    let n = required(run.file.pick(n, "n")?, "n")?;
    let m = required(run.file.pick(m, "m")?, "m")?;
    let family = family(run, family_flag)?;
    let tol = tolerance(run, tol)?;
    let config = optimizer(run, optimizer_args)?;
    let result = find_threshold(n, m, family, &config, tol)?;
    emit_thresholds(run, &[result], family, tol)?;
    Ok(0)
}

pub fn table(
    run: &Run,
    family_flag: Option<StateFamily>,
    n_list: Vec<usize>,
    tol: Option<f64>,
    optimizer_args: &OptimizerArgs,
) -> Result<u8, Failure> {
    let family = family(run, family_flag)?;
    let n_list = run.file.pick_list(n_list, "n")?;
    if n_list.is_empty() {
        return Err(Failure::usage("missing --n"));
    }
    let tol = tolerance(run, tol)?;
    let config = optimizer(run, optimizer_args)?;
    let mut results = Vec::new();
    let mut findings = 0;
    for cell in reproduce_table(family, &n_list, &config, tol)? {
        match cell {
            Ok(r) => results.push(r),
            Err(e @ Error::NoViolation { .. }) => {
                eprintln!("bellh: {e}");
                findings += 1;
            }
            Err(e) => return Err(e.into()),
        }
    }
    emit_thresholds(run, &results, family, tol)?;
    Ok(if findings > 0 { 1 } else { 0 })
}
