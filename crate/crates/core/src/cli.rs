//! Command-line driver. `run` takes the full argv and writes the report to
//! `out`, diagnostics to `err`, and returns the process exit code:
//! 0 success, 1 verification or table mismatch, 2 invalid input.

use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::{json, Value};

use crate::curve::{build_lsz_curve, CurveParams, RamPoint, SpectralCurve};
use crate::error::{Error, Result};
use crate::field::{fraction_string, int, parse_rational, Rational};
use crate::intersect::{verify_identity, verify_identity_with, AssemblyInputs, IdentityReport};
use crate::maps::{calibrate_dictionary, length_tuples, map_counts, wick_moments, MapCount};
use crate::moduli::tables::table_report;
use crate::moduli::{compute_moduli, ModuliOptions};
use crate::toprec::{compute_omega, Omega};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "lsz-tr", version, about = "Exact correlators on the LSZ spectral curve")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct CurveArg {
    /// `ref`, a config file of `key = p/q` lines, or `eps,eps_tilde,gamma_x,gamma_y`.
    #[arg(long, default_value = "ref")]
    curve: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ramification data and local derivatives of a curve.
    Curve {
        #[command(flatten)]
        curve: CurveArg,
    },
    /// Times, dual times, Bergman coefficients and dξ at both ramification points.
    Expand {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long)]
        verify_tables: bool,
        #[arg(long, default_value_t = 9)]
        k_max: usize,
        #[arg(long, default_value_t = 1)]
        d_max: usize,
    },
    /// A correlator from topological recursion.
    Omega {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: u32,
    },
    /// Compare topological recursion with the intersection-number expansion.
    Verify {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: u32,
        /// Also check that every single-input perturbation is detected.
        #[arg(long)]
        mutations: bool,
        /// Additional random integer curves to check.
        #[arg(long, default_value_t = 0)]
        samples: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Bipartite map counts from both extraction routes.
    Maps {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long, default_value_t = 1)]
        g_max: u32,
        /// Bound on the sum of boundary half-lengths.
        #[arg(long, default_value_t = 4)]
        max_total: u32,
        /// A single comma-separated tuple of half-lengths, counted at genus `--g-max`.
        #[arg(long)]
        lengths: Option<String>,
    },
    /// Exhaustive Wick expansion in the matrix model.
    Wick {
        #[arg(long, default_value = "1")]
        e: String,
        #[arg(long, default_value = "1")]
        e_tilde: String,
        #[arg(long, default_value_t = 1)]
        order: u32,
        /// Comma-separated powers `l_i` of `tr((ΦΦ†)^l_i)`.
        #[arg(long, default_value = "1")]
        word: String,
        /// Also fit the TR dictionary on `--curve` at this coupling.
        #[arg(long)]
        calibrate: Option<String>,
        #[command(flatten)]
        curve: CurveArg,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::TableMismatch { .. } | Error::CalibrationFailed { .. } => EXIT_FAIL,
        Error::Parse(_)
        | Error::Io(_)
        | Error::NotImplementedCase { .. }
        | Error::NotImplementedDimension(_)
        | Error::Unstable { .. }
        | Error::TooLarge(_)
        | Error::DegenerateCurve(_)
        | Error::PoleInput(_)
        | Error::DivisionByZero => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

pub fn load_curve(arg: &str) -> Result<SpectralCurve> {
    let params = if arg == "ref" {
        CurveParams::reference()
    } else if arg.contains(',') && !Path::new(arg).exists() {
        let v = arg.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
        if v.len() != 4 {
            return Err(Error::Parse(format!("expected four comma-separated values, got {}", v.len())));
        }
        let mut it = v.into_iter();
        CurveParams::new(it.next().unwrap(), it.next().unwrap(), it.next().unwrap(), it.next().unwrap())
    } else {
        CurveParams::load(Path::new(arg))?
    };
    build_lsz_curve(params)
}

fn parse_list(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad integer {t:?}"))))
        .collect()
}

struct Output {
    value: Value,
    text: String,
    code: i32,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn fs(q: &Rational) -> String {
    fraction_string(q)
}

fn cmd_curve(c: &SpectralCurve) -> Result<Output> {
    let mut points = Vec::new();
    let mut text = format!("{}\n", c.params());
    let mut ok = true;
    for p in RamPoint::ALL {
        let series = c.local_moduli(p, 6)?;
        let closed = c.closed_form_moduli(p, 6);
        let agree = series == closed;
        ok &= agree;
        text += &format!(
            "{} = {}  x_n = [{}]  y_n = [{}]  closed forms {}\n",
            p,
            c.point(p),
            series.x_n.iter().map(fs).collect::<Vec<_>>().join(", "),
            series.y_n.iter().map(fs).collect::<Vec<_>>().join(", "),
            if agree { "ok" } else { "MISMATCH" }
        );
        points.push(json!({
            "point": p,
            "z": fs(c.point(p)),
            "local": to_value(&series),
            "closed_form_agrees": agree,
        }));
    }
    text += &format!("delta = {}\n", c.delta());
    let value = json!({
        "params": to_value(c.params()),
        "delta": fs(&c.delta()),
        "ramification": points,
    });
    Ok(Output { value, text, code: if ok { EXIT_OK } else { EXIT_FAIL } })
}

fn cmd_expand(c: &SpectralCurve, verify: bool, k_max: usize, d_max: usize) -> Result<Output> {
    // the tables need t_k through k = 9
    let k_max = if verify { k_max.max(9) } else { k_max.max(3) };
    // t̂_k reads t_{2k+3}
    let dual = ((k_max - 3) / 2).min(ModuliOptions::default().dual_k_max);
    let opts = ModuliOptions { times_k_max: k_max, dual_k_max: dual, dxi_d_max: d_max, ..ModuliOptions::default() };
    let data = compute_moduli(c, &opts)?;
    let mut text = String::new();
    for d in &data {
        text += &format!("{}:\n", d.point);
        for (k, t) in &d.times {
            text += &format!("  t_{k} = {t}\n");
        }
        text += &format!("  exp(that_0) = {}\n", d.dual_times.exp_t0);
        for (k, t) in &d.dual_times.higher {
            text += &format!("  that_{k} = {t}\n");
        }
    }
    let mut value = json!({ "params": to_value(c.params()), "moduli": to_value(&data) });
    let mut code = EXIT_OK;
    if verify {
        let report = table_report(c, &data)?;
        if !report.all_ok() {
            code = EXIT_FAIL;
        }
        text += &format!(
            "tables: {} ({} entries)\n",
            if report.all_ok() { "PASS" } else { "FAIL" },
            report.entries.len()
        );
        if let Some(e) = report.first_failure() {
            text += &format!("  first mismatch: {} {} at {}: series {} closed {}\n", e.table, e.index, e.point, e.series, e.closed);
        }
        value["tables"] = to_value(&report);
    }
    Ok(Output { value, text, code })
}

fn cmd_omega(c: &SpectralCurve, g: u32, n: u32) -> Result<Output> {
    let (value, text) = match compute_omega(c, g, n)? {
        Omega::Omega01(y, x) => (
            json!({ "g": 0, "n": 1, "y": format!("{y:?}"), "x": format!("{x:?}") }),
            format!("omega_{{0,1}} = y dx\n  x = {x:?}\n  y = {y:?}\n"),
        ),
        Omega::Bergman(_) => (
            json!({ "g": 0, "n": 2, "bergman": "dz1 dz2/(z1 - z2)^2" }),
            "omega_{0,2} = dz1 dz2/(z1 - z2)^2\n".to_string(),
        ),
        Omega::Stable(w) => (to_value(&w), format!("{w}\n")),
    };
    Ok(Output { value, text, code: EXIT_OK })
}

fn random_curve(rng: &mut StdRng) -> Option<SpectralCurve> {
    let params = CurveParams::new(
        Rational::new(rng.gen_range(1..12).into(), rng.gen_range(1..4).into()),
        int(rng.gen_range(-3..4)),
        Rational::new(rng.gen_range(1..5).into(), rng.gen_range(1..3).into()),
        Rational::new(rng.gen_range(1..4).into(), rng.gen_range(1..3).into()),
    );
    build_lsz_curve(params).ok()
}

fn cmd_verify(c: &SpectralCurve, g: u32, n: u32, mutations: bool, samples: u32, seed: u64) -> Result<Output> {
    let mut reports: Vec<(CurveParams, IdentityReport)> = vec![(c.params().clone(), verify_identity(c, g, n)?)];
    let mut rng = StdRng::seed_from_u64(seed);
    let mut drawn = 0;
    while drawn < samples {
        if let Some(s) = random_curve(&mut rng) {
            reports.push((s.params().clone(), verify_identity(&s, g, n)?));
            drawn += 1;
        }
    }
    let mut pass = reports.iter().all(|(_, r)| r.pass);
    let mut text = String::new();
    for (p, r) in &reports {
        text += &format!("{p}\n{r}\n");
    }
    let mut value = json!({
        "pass": pass,
        "runs": reports.iter().map(|(p, r)| json!({ "params": to_value(p), "report": to_value(r) })).collect::<Vec<_>>(),
    });
    if mutations {
        let inputs = AssemblyInputs::from_curve(c)?;
        let mut rows = Vec::new();
        for (name, mutated) in inputs.unit_mutations(g, n) {
            let detected = !verify_identity_with(c, &mutated, g, n)?.pass;
            pass &= detected;
            text += &format!("mutation {name}: {}\n", if detected { "detected" } else { "MISSED" });
            rows.push(json!({ "input": name, "detected": detected }));
        }
        value["mutations"] = Value::Array(rows);
        value["pass"] = json!(pass);
    }
    Ok(Output { value, text, code: if pass { EXIT_OK } else { EXIT_FAIL } })
}

fn cmd_maps(c: &SpectralCurve, g_max: u32, max_total: u32, lengths: Option<&str>) -> Result<Output> {
    let counts: Vec<MapCount> = match lengths {
        Some(s) => vec![map_counts(c, g_max, &parse_list(s)?)?],
        None => {
            let mut v = Vec::new();
            for g in 0..=g_max {
                for ls in length_tuples(max_total) {
                    v.push(map_counts(c, g, &ls)?);
                }
            }
            v
        }
    };
    let text = counts
        .iter()
        .map(|m| format!("T^({})_{:?} = {}\n", m.g, m.boundary, m.value))
        .collect::<String>();
    Ok(Output { value: json!({ "params": to_value(c.params()), "counts": to_value(&counts) }), text, code: EXIT_OK })
}

fn cmd_wick(e: &str, et: &str, order: u32, word: &str, calibrate: Option<&str>, curve: &str) -> Result<Output> {
    let (e, et) = (parse_rational(e)?, parse_rational(et)?);
    let w = wick_moments(&e, &et, order, &parse_list(word)?)?;
    let mut text = format!(
        "order {} word {:?}: {} pairings\n  full      {}\n  connected {}\n  cumulant  {}\n",
        w.order, w.word, w.pairings, w.full, w.connected, w.cumulant
    );
    let mut value = json!({ "e": fs(&e), "e_tilde": fs(&et), "expansion": to_value(&w) });
    if let Some(lambda) = calibrate {
        let c = load_curve(curve)?;
        let r = calibrate_dictionary(&c, &e, &et, &parse_rational(lambda)?)?;
        text += &format!("{r}\n");
        value["calibration"] = to_value(&r);
    }
    Ok(Output { value, text, code: EXIT_OK })
}

fn dispatch(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Curve { curve } => cmd_curve(&load_curve(&curve.curve)?),
        Command::Expand { curve, verify_tables, k_max, d_max } => {
            cmd_expand(&load_curve(&curve.curve)?, *verify_tables, *k_max, *d_max)
        }
        Command::Omega { curve, g, n } => cmd_omega(&load_curve(&curve.curve)?, *g, *n),
        Command::Verify { curve, g, n, mutations, samples, seed } => {
            if !matches!((g, n), (0, 4) | (1, 1)) {
                return Err(Error::NotImplementedCase { g: *g as i64, n: *n as i64 });
            }
            cmd_verify(&load_curve(&curve.curve)?, *g, *n, *mutations, *samples, *seed)
        }
        Command::Maps { curve, g_max, max_total, lengths } => {
            cmd_maps(&load_curve(&curve.curve)?, *g_max, *max_total, lengths.as_deref())
        }
        Command::Wick { e, e_tilde, order, word, calibrate, curve } => {
            cmd_wick(e, e_tilde, *order, word, calibrate.as_deref(), &curve.curve)
        }
    }
}

pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if code == EXIT_OK { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(o) => {
            let res = if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&o.value).expect("json"))
            } else {
                write!(out, "{}", o.text)
            };
            if res.is_err() {
                return EXIT_FAIL;
            }
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut argv = vec!["lsz-tr"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn verify_reference() {
        let (code, out, _) = call(&["verify", "--g", "0", "--n", "4", "--curve", "ref"]);
        assert_eq!(code, 0);
        assert!(out.contains("PASS"));
    }

    #[test]
    fn out_of_scope_case() {
        let (code, _, err) = call(&["verify", "--g", "2", "--n", "0"]);
        assert_eq!(code, 2);
        assert!(err.contains("not implemented"));
    }

    #[test]
    fn table_run() {
        assert_eq!(call(&["expand", "--verify-tables", "--curve", "ref"]).0, 0);
    }

    #[test]
    fn bad_input() {
        assert_eq!(call(&["curve", "--curve", "1,2,3"]).0, 2);
        assert_eq!(call(&["curve", "--curve", "3,0,1/0,1"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["wick", "--word", "3", "--order", "2"]).0, 2);
    }

    #[test]
    fn inline_curve() {
        let (code, out, _) = call(&["--json", "curve", "--curve", "5,1,2,1"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["params"]["eps"], "5/1");
    }

    #[test]
    fn json_is_repeatable() {
        for args in [
            &["--json", "omega", "--g", "1", "--n", "1"][..],
            &["--json", "maps", "--max-total", "3"],
            &["--json", "wick", "--e", "1/2", "--e-tilde", "3/2", "--word", "1,1"],
            &["--json", "verify", "--g", "1", "--n", "1", "--samples", "2", "--seed", "7"],
        ] {
            let a = call(args);
            let b = call(args);
            assert_eq!(a.0, 0, "{args:?}: {}", a.2);
            assert_eq!(a.1, b.1);
        }
    }
}
