use std::fs;
use std::path::Path;

use serde_json::{json, Value};
use zpeff::entropy::{shannon_discrete, varentropy_discrete};
use zpeff::format::csv_number;
use zpeff::ingest::{
    empirical_gini, fit_pareto_hill, fit_zipf, tokenize_corpus, top_share, RankFrequency,
    RankWindow, SampleSet, TokenizerOptions, ZipfFit,
};
use zpeff::measures::{discrete_efficiency, Distribution};
use zpeff::pareto::{thresholds, zp_efficiency};
use zpeff::stability::{delta_for_epsilon, run_stability_trials, StabilityTrialConfig};
use zpeff::variational::{solve_stationary, verify_power_law, VariationalProblem};
use zpeff::{Error, Result};

use crate::curves::emit_curves;
use crate::output::{pretty, Format, Record};
use crate::{
    Cli, Command, CurvesArgs, FitArgs, MaximizeArgs, MeasureArgs, RootsArgs, StabilityArgs,
};

/// Share reported by `fit --samples`.
const TOP_FRACTION: f64 = 0.2;

pub(crate) struct Done {
    pub stdout: String,
    pub summary: Option<String>,
}

pub(crate) fn execute(cli: &Cli) -> Result<Done> {
    let f = cli.format;
    match &cli.command {
        Command::Measure(args) => measure(args, f),
        Command::Curves(args) => curves(args, f),
        Command::Fit(args) => fit(args, f),
        Command::Stability(args) => stability(args, cli.seed, f),
        Command::Roots(args) => roots(args, f),
        Command::Maximize(args) => maximize(args, f),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Numbers separated by commas and/or whitespace; `#` starts a comment.
fn parse_numbers(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|e| Error::Parse(format!("{t:?}: {e}")))
        })
        .collect()
}

fn measure(args: &MeasureArgs, f: Format) -> Result<Done> {
    let weights = match (&args.dist, &args.input) {
        (Some(d), _) => d.clone(),
        (None, Some(path)) => parse_numbers(&read_text(path)?)?,
        (None, None) => unreachable!("clap requires a source"),
    };
    let p = if args.normalize {
        Distribution::renormalize(&weights)?
    } else {
        Distribution::new(weights)?
    };
    let a = args.a;
    let b = args.b.or((a > 0.0 && a < 1.0).then_some(a));
    let eta = discrete_efficiency(&p, a)?;
    let mut rec = Record::new()
        .real("a", a)
        .count("states", p.len() as u64)
        .count("support", p.support_size() as u64)
        .real("efficiency", eta)
        .real("shannon", shannon_discrete(&p));
    if let Some(b) = b {
        rec = rec.real("b", b).real("varentropy", varentropy_discrete(&p, b)?);
    }
    Ok(Done {
        stdout: rec.render(f),
        summary: Some(format!("efficiency = {}", csv_number(eta))),
    })
}

fn curves(args: &CurvesArgs, f: Format) -> Result<Done> {
    let table = emit_curves(args.figure, args.grid as usize)?;
    Ok(Done {
        stdout: table.render(f),
        summary: Some(format!(
            "figure {}: {} rows, columns {}",
            args.figure,
            table.rows(),
            table
                .columns
                .iter()
                .map(|c| c.name.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        )),
    })
}

fn zipf_record(fit: &ZipfFit, rf: &RankFrequency) -> Record {
    Record::new()
        .real("alpha", fit.alpha)
        .real("x1", fit.x1)
        .real("r_squared", fit.r_squared)
        .text("window", format!("{}:{}", fit.window.lo, fit.window.hi))
        .count("distinct", rf.len() as u64)
        .count("total", rf.total())
}

fn fit(args: &FitArgs, f: Format) -> Result<Done> {
    if let Some(path) = &args.samples {
        return fit_samples(path, args.xmin, f);
    }
    let rf = match (&args.corpus, &args.counts) {
        (Some(path), _) => {
            let bytes = fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            tokenize_corpus(
                &bytes,
                TokenizerOptions {
                    case_fold: !args.keep_case,
                },
            )?
        }
        (None, Some(path)) => RankFrequency::read_count_table(read_text(path)?.as_bytes())?,
        (None, None) => unreachable!("clap requires a source"),
    };
    let window = args.window.map(|(lo, hi)| RankWindow::new(lo, hi)).transpose()?;
    let zipf = fit_zipf(&rf, window)?;
    let rec = zipf_record(&zipf, &rf);
    let stdout = match f {
        Format::Csv => rec.to_comments() + &rf.to_csv()?,
        Format::Json => {
            let mut map = rec.to_json_map();
            map.insert(
                "ranks".into(),
                serde_json::to_value(rf.entries()).expect("entries serialize"),
            );
            pretty(&Value::Object(map))
        }
    };
    Ok(Done {
        stdout,
        summary: Some(format!(
            "zipf alpha = {} (r^2 = {}, ranks {}:{})",
            csv_number(zipf.alpha),
            csv_number(zipf.r_squared),
            zipf.window.lo,
            zipf.window.hi
        )),
    })
}

fn fit_samples(path: &Path, xmin: Option<f64>, f: Format) -> Result<Done> {
    let s = SampleSet::parse(&read_text(path)?, xmin)?;
    let hill = fit_pareto_hill(&s)?;
    let gini = empirical_gini(&s)?;
    let rec = Record::new()
        .count("n", hill.n as u64)
        .real("x_min", hill.x_min)
        .real("beta", hill.beta)
        .real("std_err", hill.std_err)
        .real("gini", gini)
        .real("gini_from_beta", 1.0 / (2.0 * hill.beta - 1.0))
        .real("top_share_q", TOP_FRACTION)
        .real("top_share", top_share(&s, TOP_FRACTION)?);
    Ok(Done {
        stdout: rec.render(f),
        summary: Some(format!(
            "pareto beta = {} ± {}, gini = {}",
            csv_number(hill.beta),
            csv_number(hill.std_err),
            csv_number(gini)
        )),
    })
}

fn stability(args: &StabilityArgs, seed: u64, f: Format) -> Result<Done> {
    let delta = match (args.delta, args.epsilon) {
        (Some(d), _) => d,
        (None, Some(eps)) => delta_for_epsilon(eps, args.a)?,
        (None, None) => unreachable!("clap requires a radius"),
    };
    let cfg = StabilityTrialConfig {
        a: args.a,
        n_values: args.sizes.clone(),
        delta,
        trials: args.trials,
        seed,
    };
    let report = run_stability_trials(&cfg)?;
    let header = Record::new()
        .real("a", report.a)
        .count("seed", report.seed)
        .count("trials", report.trials as u64)
        .flag("pass", report.pass);
    let stdout = match f {
        Format::Csv => header.to_comments() + &report.to_csv(),
        Format::Json => report.to_json() + "\n",
    };
    let worst = report.cells.iter().map(|c| c.max_ratio).fold(0.0, f64::max);
    Ok(Done {
        stdout,
        summary: Some(format!(
            "stability {}: max ratio {} at delta {}",
            if report.pass { "PASS" } else { "FAIL" },
            csv_number(worst),
            csv_number(delta)
        )),
    })
}

fn roots(args: &RootsArgs, f: Format) -> Result<Done> {
    let t = thresholds(args.tol)?;
    let rec = Record::new()
        .real("a_star", t.a_star)
        .real("beta_star", t.beta_star)
        .real("gini_star", t.gini_star)
        .real("shannon_zero_beta", t.shannon_zero_beta)
        .real("eta_at_beta_star", zp_efficiency(t.beta_star)?);
    Ok(Done {
        stdout: rec.render(f),
        summary: Some(format!("a* = {}", csv_number(t.a_star))),
    })
}

/// `lo:hi` integer range, an existing file, or an inline list.
fn achievement_levels(spec: &str) -> Result<Vec<f64>> {
    if let Some((lo, hi)) = spec.split_once(':') {
        if let (Ok(lo), Ok(hi)) = (lo.trim().parse::<u64>(), hi.trim().parse::<u64>()) {
            if lo == 0 || hi <= lo {
                return Err(Error::Validation(format!(
                    "level range {lo}:{hi} must satisfy 1 <= lo < hi"
                )));
            }
            return Ok((lo..=hi).map(|i| i as f64).collect());
        }
    }
    let path = Path::new(spec);
    if path.is_file() {
        return parse_numbers(&read_text(path)?);
    }
    parse_numbers(spec)
}

fn maximize(args: &MaximizeArgs, f: Format) -> Result<Done> {
    let values = achievement_levels(&args.values)?;
    let prob = match (args.mean, args.multiplier) {
        (Some(mu), _) => VariationalProblem::with_mean(values, args.a, mu)?,
        (None, Some(c)) => VariationalProblem::with_multiplier(values, args.a, c)?,
        (None, None) => unreachable!("clap requires a constraint"),
    };
    let sol = solve_stationary(&prob, args.tol)?;
    let check = verify_power_law(&sol, args.a).ok();

    let mut rec = Record::new().real("a", args.a);
    rec = match prob.constraint {
        zpeff::variational::Constraint::Mean(mu) => rec.real("mean", mu),
        zpeff::variational::Constraint::Multiplier(c) => rec.real("multiplier", c),
    };
    if let Some(m) = sol.multipliers {
        rec = rec.real("lambda", m.normalization).real("c", m.mean);
    }
    if let Some(s) = sol.shift {
        rec = rec.real("shift", s);
    }
    if let (Some(e), Some((lo, hi))) = (sol.fitted_exponent, sol.fit_window) {
        rec = rec
            .real("density_exponent", e)
            .text("density_window", format!("{lo}:{hi}"));
    }
    if let Some(c) = &check {
        rec = rec
            .real("ccdf_exponent", c.ccdf_exponent)
            .real("ccdf_expected", c.expected)
            .text("ccdf_window", format!("{}:{}", c.window.0, c.window.1));
    }
    rec = rec.real("residual", sol.residual);

    let stdout = match f {
        Format::Csv => rec.to_comments() + &sol.to_csv(),
        Format::Json => {
            let mut v = serde_json::to_value(&sol).expect("solution serializes");
            v["power_law"] = check.map_or(Value::Null, |c| json!(c));
            pretty(&v)
        }
    };
    Ok(Done {
        stdout,
        summary: Some(match (sol.fitted_exponent, check) {
            (Some(e), Some(c)) => format!(
                "density exponent {} (expected {}), ccdf exponent {} (expected {})",
                csv_number(e),
                csv_number(-1.0 / args.a),
                csv_number(c.ccdf_exponent),
                csv_number(c.expected)
            ),
            _ => format!("residual {}", csv_number(sol.residual)),
        }),
    })
}
