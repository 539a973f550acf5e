use super::{Outcome, ParamSpec, Params, Status};
use crate::averages::{fmt_num, log_mean_by, suite_rng, SampledFunction};
use crate::coloring::{
    extremal_boundary, extremal_coloring, find_monochromatic, interval_coloring, richness_scan, verify_extremal,
    Coloring, RichnessConfig,
};
use crate::dioph::{
    coprimality_check, dioph_verify, gamma_coprimality, gamma_exact, vino_suite, weyl_point, weyl_structure_scan,
    AlmostPrimeFamily, DiophParams, DiophReport, ScanOptions, WeylOptions,
};
use crate::error::{LabError, Result};
use crate::numtheory::{e, sieve_primes};
use crate::projections::{project, u1_norm, u1log_norm, NormParams};
use crate::search::{sp_number, Verdict};
use crate::selberg::{band_decompose, verify_sieve_bounds, Normalizer, SelbergSieve};
use crate::suite::{run_suite, trivial_checks, Lemma, SuiteReport};
use num_complex::Complex64;
use rand::Rng;
use serde_json::{json, Value};

pub(crate) struct CommandSpec {
    pub name: &'static str,
    pub about: &'static str,
    pub params: &'static [ParamSpec],
    pub run: fn(&Params) -> Result<Outcome>,
}

const fn p(key: &'static str, default: &'static str, help: &'static str) -> ParamSpec {
    ParamSpec { key, default, help }
}

macro_rules! with_source {
    ($random:literal, $n:literal, $r:literal $(, $extra:expr)* $(,)?) => {
        &[
            p("coloring", "", "run-length JSON coloring file"),
            p("starts", "", "class starts a_1 < a_2 < ... of an interval coloring of [n]"),
            p("random", $random, "1: uniform random coloring of [n] with r colors (overrides extremal)"),
            p("extremal", "3", "r of the interval coloring with boundaries (3^i+9)/2, used when no other source is set"),
            p("n", $n, "length for starts/random"),
            p("r", $r, "colors for random"),
            p("seed", "1", "seed for random"),
            $($extra),*
        ]
    };
}

pub(crate) const SPECS: &[CommandSpec] = &[
    CommandSpec {
        name: "extremal",
        about: "Interval coloring [a_i, a_{i+1}) with a_i = (3^i+9)/2 of [(3^r+7)/2], checked exhaustively for a monochromatic {x+y, xy}",
        params: &[p("r", "3", "number of colors"), p("rmax", "", "check every r..=rmax")],
        run: extremal,
    },
    CommandSpec {
        name: "detect",
        about: "Exhaustive search for x > y > 2 with x+y and xy of one color",
        params: with_source!("0", "1000", "2"),
        run: detect,
    },
    CommandSpec {
        name: "threshold",
        about: "Least N with no r-coloring of [N] avoiding monochromatic {x+y, xy}, with certificates at N-1 and N",
        params: &[
            p("r", "1", "number of colors"),
            p("nmax", "10000", "largest N searched"),
            p("budget", "20000000", "search node budget per N"),
        ],
        run: threshold,
    },
    CommandSpec {
        name: "norms",
        about: "Progression-bias norms U^1_log[N; q, H], U^1[N; q, H] and the averaging projection Pi_{q,H}",
        params: &[
            p("f", "random", "random | phase | quadratic | periodic | constant"),
            p("n", "1000", "length N"),
            p("qmax", "10", "q = 1..qmax"),
            p("h", "10", "window H"),
            p("seed", "1", "seed for f=random"),
            p("alpha", "0.1", "frequency for phase e(alpha n) and quadratic e(alpha n^2)"),
            p("period", "3", "period for e(n/period)"),
        ],
        run: norms,
    },
    CommandSpec {
        name: "lemma-check",
        about: "Seeded defect suites for the logarithmic-averaging and projection inequalities",
        params: &[
            p("name", "shift", "lemma name, comma list, all, averages or projections"),
            p("n", "1000", "length N (comma list allowed)"),
            p("draws", "200", "draws per lemma and N"),
            p("seed", "1", "suite seed"),
            p("trivial", "1", "1: also run the exact degenerate cases"),
        ],
        run: lemma_check,
    },
    CommandSpec {
        name: "dioph",
        about: "Linear-equation structure of large exponential sums: interval and almost-prime families, recurrence, coprimality and von Mangoldt scans",
        params: &[
            p("mode", "interval", "interval | family | vino | weyl | weyl-point | gamma | coprimality"),
            p("d", "1000", "interval [1, D]"),
            p("l", "2", "exponent L (family: 0 selects the empirical L)"),
            p("lp", "8", "L' (family: 0 selects k)"),
            p("deltas", "0.05,0.1,0.2,0.4", "levels delta"),
            p("windows", "3-8,11-30", "half-open prime windows lo-hi"),
            p("j", "1", "prime-power exponent of the family"),
            p("seed", "1", "vino seed"),
            p("draws", "1000", "vino draws"),
            p("x", "100000", "von Mangoldt length X, or the prime bound for gamma"),
            p("m", "1", "polynomial degree n^m"),
            p("eps", "0.2", "flag level epsilon"),
            p("e", "6", "structure exponent E"),
            p("theta", "0.3333333333333333", "frequency for weyl-point"),
            p("set", "", "explicit set for gamma (exact rational)"),
            p("grid", "0", "grid size override (0: automatic)"),
            p("grid_budget", "16777216", "largest grid"),
            p("max_rows", "10000", "passing rows kept"),
        ],
        run: dioph,
    },
    CommandSpec {
        name: "sieve",
        about: "Selberg-weight majorant of the primes, its Ramanujan expansion and the dyadic band decomposition",
        params: &[
            p("x", "100000", "window [X, 2X)"),
            p("r", "", "sieve level R (empty: X^rexp)"),
            p("rexp", "0.25", "R = X^rexp"),
            p("q", "6", "band cutoff Q"),
            p("c", "0.125", "band exponent c"),
            p("a", "4", "threshold exponent A"),
            p("normalizer", "mu2", "mu2 | mu"),
            p("samples", "1000", "reconstruction samples"),
            p("seed", "1", "sample seed"),
        ],
        run: sieve,
    },
    CommandSpec {
        name: "richness",
        about: "Color densities along the dilates b n for b in B_0 and the prime-window pair statistics",
        params: with_source!(
            "1",
            "10000000",
            "3",
            p("v", "2", "base V of B_0 = {V^(4^i)}"),
            p("imax", "2", "largest i in B_0"),
            p("windows", "3-8,11-30", "half-open prime windows lo-hi"),
            p("kmax", "2", "pair statistics use k = 1..kmax windows"),
        ),
        run: richness,
    },
];

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| LabError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn with_writer(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<String> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(String::from_utf8(buf).expect("csv is utf-8"))
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn flag(p: &Params, key: &str) -> Result<bool> {
    match p.raw(key) {
        "1" | "true" | "yes" => Ok(true),
        "0" | "false" | "no" | "" => Ok(false),
        v => Err(LabError::Config(format!("{key}={v} is not a boolean"))),
    }
}

fn pass_word(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn verdict(pass: bool) -> Status {
    if pass {
        Status::Pass
    } else {
        Status::BoundFail
    }
}

fn load_coloring(p: &Params) -> Result<(Coloring, String)> {
    if p.has("coloring") {
        let path = p.raw("coloring");
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Io(format!("{path}: {e}")))?;
        return Ok((Coloring::from_rle_json(&text)?, format!("file {path}")));
    }
    if p.has("starts") {
        let starts: Vec<u64> = p.list("starts")?;
        let n: u64 = p.get("n")?;
        return Ok((interval_coloring(n, &starts)?, format!("interval coloring of [{n}]")));
    }
    if flag(p, "random")? {
        let (n, r, seed) = (p.get("n")?, p.get("r")?, p.get("seed")?);
        return Ok((Coloring::random(n, r, seed)?, format!("random {r}-coloring of [{n}], seed {seed}")));
    }
    let r: u32 = p.get("extremal")?;
    Ok((extremal_coloring(r)?, format!("extremal {r}-coloring")))
}

fn extremal(p: &Params) -> Result<Outcome> {
    let r: u32 = p.get("r")?;
    let rmax: u32 = if p.has("rmax") { p.get("rmax")? } else { r };
    if rmax < r {
        return Err(LabError::Config(format!("rmax = {rmax} is below r = {r}")));
    }
    let reports = (r..=rmax).map(verify_extremal).collect::<Result<Vec<_>>>()?;
    let mut summary = Vec::new();
    let mut rows = Vec::new();
    for rep in &reports {
        let expected = extremal_boundary(rep.r)? - 1;
        let ok = rep.pass() && rep.n == expected;
        summary.push(match rep.witness {
            None => format!("r={}: N={}, no monochromatic pair", rep.r, rep.n),
            Some(w) => format!(
                "r={}: N={}, monochromatic pair x={} y={} color {} FAIL",
                rep.r, rep.n, w.x, w.y, w.color
            ),
        });
        let w = rep.witness;
        rows.push(vec![
            rep.r.to_string(),
            rep.n.to_string(),
            rep.boundaries.iter().map(u64::to_string).collect::<Vec<_>>().join(";"),
            w.map_or(String::new(), |w| w.x.to_string()),
            w.map_or(String::new(), |w| w.y.to_string()),
            (ok as u8).to_string(),
        ]);
    }
    let pass = reports.iter().all(|r| r.pass());
    Ok(Outcome {
        status: verdict(pass),
        csv: csv_table(&["r", "N", "boundaries", "witness_x", "witness_y", "pass"], rows)?,
        json: json!({ "reports": to_json(&reports)?, "pass": pass }),
        summary,
    })
}

fn detect(p: &Params) -> Result<Outcome> {
    let (c, what) = load_coloring(p)?;
    let w = find_monochromatic(&c);
    let valid = w.is_none_or(|w| w.is_valid_for(&c));
    let line = match w {
        None => format!("{what}: N={}, r={}, no monochromatic pair", c.n(), c.r()),
        Some(w) => format!(
            "{what}: N={}, r={}, monochromatic x={} y={} (x+y={}, xy={}) color {}",
            c.n(),
            c.r(),
            w.x,
            w.y,
            w.sum,
            w.prod,
            w.color
        ),
    };
    let rows = w.map(|w| {
        vec![w.x.to_string(), w.y.to_string(), w.sum.to_string(), w.prod.to_string(), w.color.to_string()]
    });
    Ok(Outcome {
        status: verdict(valid),
        csv: csv_table(&["x", "y", "sum", "prod", "color"], rows)?,
        json: json!({ "n": c.n(), "r": c.r(), "source": what, "witness": to_json(&w)? }),
        summary: vec![line],
    })
}

fn threshold(p: &Params) -> Result<Outcome> {
    let r: u32 = p.get("r")?;
    let res = sp_number(r, p.get("nmax")?, p.get("budget")?)?;
    let lower = (3u64.pow(r.min(30)) + 7) / 2;
    let cert_row = |c: &Option<crate::search::SearchCertificate>| match c {
        Some(c) => [
            c.n.to_string(),
            format!("{:?}", c.verdict).to_lowercase(),
            (c.verify() as u8).to_string(),
            c.trace.method.clone(),
        ],
        None => Default::default(),
    };
    let b = cert_row(&res.below);
    let a = cert_row(&res.at);
    let row = vec![
        r.to_string(),
        res.threshold.map_or(String::new(), |t| t.to_string()),
        lower.to_string(),
        b[0].clone(),
        b[1].clone(),
        b[2].clone(),
        a[0].clone(),
        a[1].clone(),
        a[2].clone(),
        a[3].clone(),
    ];
    let (status, mut summary) = match res.threshold {
        Some(n) => {
            let below_ok = res.below.as_ref().is_some_and(|c| c.verdict == Verdict::Colorable && c.verify());
            let at_ok = res.at.as_ref().is_some_and(|c| c.verdict == Verdict::NotColorable && c.verify());
            let ok = below_ok && at_ok && n > lower;
            let at_kind = match (r, res.at.as_ref()) {
                (1, _) => "monochromatic edge",
                (2, _) => "odd cycle",
                _ => "exhaustive search",
            };
            (
                verdict(ok),
                vec![
                    format!("N*={n}"),
                    format!(
                        "below: {r}-coloring of [{}] {}; at: {at_kind} at N={n} {}",
                        n - 1,
                        pass_word(below_ok),
                        pass_word(at_ok)
                    ),
                    format!("construction lower bound (3^r+7)/2 = {lower}"),
                ],
            )
        }
        None if res.note.starts_with("every") => (Status::Pass, vec![format!("no threshold: {}", res.note)]),
        None => (Status::Timeout, vec![format!("indeterminate: {}", res.note)]),
    };
    if let Some(cyc) = res.at.as_ref().and_then(|c| c.odd_cycle.as_ref()) {
        let s: Vec<_> = cyc.iter().map(u64::to_string).collect();
        summary.push(format!("odd cycle: {}", s.join(" ")));
    }
    Ok(Outcome {
        status,
        csv: csv_table(
            &[
                "r",
                "N_star",
                "lower_bound",
                "below_N",
                "below_verdict",
                "below_verified",
                "at_N",
                "at_verdict",
                "at_verified",
                "at_method",
            ],
            [row],
        )?,
        json: to_json(&res)?,
        summary,
    })
}

fn norms(p: &Params) -> Result<Outcome> {
    let n: u64 = p.get("n")?;
    let qmax: u64 = p.get("qmax")?;
    let h: u64 = p.get("h")?;
    if n == 0 || qmax == 0 || h == 0 {
        return Err(LabError::Domain("n, qmax and h must be positive".into()));
    }
    let reach = qmax
        .checked_mul(h)
        .and_then(|v| v.checked_mul(2))
        .filter(|&v| n.checked_add(v).is_some_and(|t| t < 1 << 40))
        .ok_or_else(|| LabError::Capacity(format!("N + 2 qmax H is too large (N = {n})")))? as i64;
    let (lo, hi) = (1 - reach, n as i64 + reach);
    let alpha: f64 = p.get("alpha")?;
    let period: u64 = p.get("period")?;
    let kind = p.raw("f");
    let f = match kind {
        "random" => SampledFunction::random_disc(lo, hi, p.get("seed")?, 0)?,
        "phase" => SampledFunction::from_fn(lo, hi, 1.0, |m| e(alpha * m as f64))?,
        "quadratic" => SampledFunction::from_fn(lo, hi, 1.0, |m| e(alpha * (m as f64) * (m as f64)))?,
        "periodic" if period > 0 => {
            SampledFunction::from_fn(lo, hi, 1.0, |m| e(m.rem_euclid(period as i64) as f64 / period as f64))?
        }
        "periodic" => return Err(LabError::Domain("period must be positive".into())),
        "constant" => SampledFunction::constant(lo, hi, Complex64::new(1.0, 0.0))?,
        other => return Err(LabError::Config(format!("unknown f '{other}'"))),
    };
    let mut rows = Vec::new();
    let mut table = Vec::new();
    let mut warnings = 0;
    for q in 1..=qmax {
        let np = NormParams::new(n, q, h)?;
        let a = u1log_norm(&f, np)?;
        let b = u1_norm(&f, np)?;
        let proj = project(&f, q, h)?;
        proj.require_cover(1, n as i64, "projection")?;
        let pl2 = log_mean_by(n, |m| Complex64::new(proj.eval(m).norm_sqr(), 0.0)).re.max(0.0).sqrt();
        let warn = np.warning().is_some();
        warnings += warn as usize;
        rows.push(vec![
            q.to_string(),
            h.to_string(),
            format!("{a:e}"),
            format!("{b:e}"),
            format!("{pl2:e}"),
            (warn as u8).to_string(),
        ]);
        table.push(json!({ "q": q, "h": h, "u1log": a, "u1": b, "proj_l2log": pl2, "qh_not_below_n": warn }));
    }
    let mut summary = vec![format!("f={kind} N={n} H={h} q=1..{qmax}")];
    if warnings > 0 {
        summary.push(format!("{warnings} rows have qH >= N; error terms degrade there"));
    }
    Ok(Outcome {
        status: Status::Pass,
        csv: csv_table(&["q", "H", "u1log", "u1", "proj_l2log", "qh_not_below_n"], rows)?,
        json: json!({ "rows": table }),
        summary,
    })
}

fn lemmas(spec: &str) -> Result<Vec<Lemma>> {
    let mut out: Vec<Lemma> = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let add: Vec<Lemma> = match part {
            "all" => Lemma::ALL.to_vec(),
            "averages" => Lemma::AVERAGES.to_vec(),
            "projections" => Lemma::PROJECTIONS.to_vec(),
            name => vec![name.parse()?],
        };
        for l in add {
            if !out.contains(&l) {
                out.push(l);
            }
        }
    }
    if out.is_empty() {
        return Err(LabError::Config("name selects no lemma".into()));
    }
    Ok(out)
}

fn lemma_check(p: &Params) -> Result<Outcome> {
    let names = lemmas(p.raw("name"))?;
    let ns: Vec<u64> = p.list("n")?;
    let draws: usize = p.get("draws")?;
    let seed: u64 = p.get("seed")?;
    let mut reports: Vec<SuiteReport> = Vec::new();
    for &n in &ns {
        for &l in &names {
            reports.push(run_suite(l, n, draws, seed)?);
        }
    }
    let csv = with_writer(|buf| {
        for (i, r) in reports.iter().enumerate() {
            r.write_csv(&mut *buf, i == 0)?;
        }
        Ok(())
    })?;
    let mut summary: Vec<String> = reports.iter().map(SuiteReport::summary_line).collect();
    let mut pass = reports.iter().all(|r| r.pass);
    let mut trivial = Vec::new();
    if flag(p, "trivial")? {
        for &n in &ns {
            let checks = trivial_checks(n)?;
            let bad: Vec<_> = checks.iter().filter(|c| !c.pass()).map(|c| c.name.clone()).collect();
            summary.push(format!(
                "trivial N={n}: {}/{} exact to 1e-12{}",
                checks.len() - bad.len(),
                checks.len(),
                if bad.is_empty() { String::new() } else { format!(" (failed: {})", bad.join(", ")) }
            ));
            pass &= bad.is_empty();
            trivial.push(json!({ "n": n, "checks": to_json(&checks)? }));
        }
    }
    if let Some(worst) = reports.iter().max_by(|a, b| (a.max_ratio / a.limit).total_cmp(&(b.max_ratio / b.limit))) {
        summary.push(format!(
            "max ratio {:e} ({} N={}, limit {}) {}",
            worst.max_ratio,
            worst.lemma.name(),
            worst.n,
            fmt_num(worst.limit),
            pass_word(pass)
        ));
    }
    Ok(Outcome {
        status: verdict(pass),
        csv,
        json: json!({ "suites": to_json(&reports)?, "trivial": trivial, "pass": pass }),
        summary,
    })
}

fn scan_options(p: &Params) -> Result<ScanOptions> {
    let grid: usize = p.get("grid")?;
    Ok(ScanOptions {
        grid_size: (grid > 0).then_some(grid),
        grid_budget: p.get("grid_budget")?,
        max_rows: p.get("max_rows")?,
    })
}

fn scan_outcome(rep: &DiophReport, mut summary: Vec<String>, extra: Value) -> Result<Outcome> {
    let s = &rep.summary;
    summary.push(format!(
        "grid={} flagged={} passes={} failures={} max_exponent_min={:e} {}",
        s.grid_size,
        s.flagged,
        s.passes,
        s.failures,
        s.max_exponent_min,
        pass_word(rep.pass())
    ));
    Ok(Outcome {
        status: verdict(rep.pass()),
        csv: with_writer(|buf| rep.write_csv(buf))?,
        json: json!({ "report": to_json(rep)?, "setup": extra }),
        summary,
    })
}

fn dioph(p: &Params) -> Result<Outcome> {
    match p.raw("mode") {
        "interval" => {
            let d: u64 = p.get("d")?;
            if d == 0 || d > 1 << 40 {
                return Err(LabError::Domain(format!("D = {d} out of range")));
            }
            let s: Vec<i64> = (1..=d as i64).collect();
            let params = DiophParams::new(p.get("l")?, p.get("lp")?, d as f64)?;
            let rep = dioph_verify(&s, params, &p.list::<f64>("deltas")?, scan_options(p)?)?;
            scan_outcome(&rep, vec![format!("S=[1,{d}] L={} L'={}", params.l, params.lp)], to_json(&params)?)
        }
        "family" => {
            let fam = AlmostPrimeFamily::new(&p.intervals("windows")?, p.get("j")?)?;
            let lp: f64 = p.get("lp")?;
            let lp = if lp == 0.0 { fam.k() as f64 } else { lp };
            let deltas: Vec<f64> = p.list("deltas")?;
            let opts = scan_options(p)?;
            let mut l: f64 = p.get("l")?;
            if l == 0.0 {
                let probe = dioph_verify(&fam.elements_i64(), DiophParams::new(1.0, lp, fam.natural_scale())?, &deltas, opts)?;
                l = probe.summary.max_exponent_min.max(1.0) * (1.0 + 1e-9);
            }
            let params = DiophParams::new(l, lp, fam.natural_scale())?;
            let rep = dioph_verify(&fam.elements_i64(), params, &deltas, opts)?;
            let head = format!(
                "family k={} j={} |S|={} D={:e} L={l} L'={lp}",
                fam.k(),
                fam.j,
                fam.elements.len(),
                fam.natural_scale()
            );
            scan_outcome(&rep, vec![head], to_json(&params)?)
        }
        "vino" => {
            let seed: u64 = p.get("seed")?;
            let suite = vino_suite(seed, p.get("draws")?)?;
            let rows = suite.results.iter().map(|r| {
                vec![
                    format!("{:e}", r.alpha),
                    r.t.to_string(),
                    format!("{:e}", r.delta1),
                    format!("{:e}", r.delta2),
                    r.count.to_string(),
                    (r.hypothesis as u8).to_string(),
                    r.q.map_or(String::new(), |q| q.to_string()),
                    (r.alarm as u8).to_string(),
                ]
            });
            let pass = suite.alarms == 0;
            Ok(Outcome {
                status: verdict(pass),
                csv: csv_table(&["alpha", "T", "delta1", "delta2", "count", "hypothesis", "q", "alarm"], rows)?,
                summary: vec![format!(
                    "vino seed={seed} draws={} hypothesis_held={} alarms={} {}",
                    suite.draws,
                    suite.hypothesis_held,
                    suite.alarms,
                    pass_word(pass)
                )],
                json: to_json(&suite)?,
            })
        }
        "weyl" => {
            let (x, m, eps): (u64, u32, f64) = (p.get("x")?, p.get("m")?, p.get("eps")?);
            let opts = WeylOptions {
                exponent: p.get("e")?,
                scan: scan_options(p)?,
            };
            let rep = weyl_structure_scan(x, m, eps, opts)?;
            let near_third = rep
                .rows
                .iter()
                .filter(|r| (r.theta - 1.0 / 3.0).abs() < 1e-3)
                .map(|r| r.q)
                .collect::<Vec<_>>();
            let mut head = vec![format!("von Mangoldt X={x} m={m} eps={eps} E={}", opts.exponent)];
            if !near_third.is_empty() {
                head.push(format!("rows near 1/3 have q in {near_third:?}"));
            }
            scan_outcome(&rep, head, json!({ "x": x, "m": m, "eps": eps, "exponent": opts.exponent }))
        }
        "weyl-point" => {
            let (x, m, eps, theta, ex): (u64, u32, f64, f64, f64) =
                (p.get("x")?, p.get("m")?, p.get("eps")?, p.get("theta")?, p.get("e")?);
            let w = weyl_point(x, m, theta, eps, ex)?;
            Ok(Outcome {
                status: verdict(w.pass),
                csv: csv_table(
                    &["theta", "abs_sum", "flagged", "q", "err", "exponent_min", "pass"],
                    [vec![
                        format!("{:e}", w.theta),
                        format!("{:e}", w.abs_sum),
                        (w.flagged as u8).to_string(),
                        w.q.map_or(String::new(), |q| q.to_string()),
                        format!("{:e}", w.err),
                        format!("{:e}", w.exponent_min),
                        (w.pass as u8).to_string(),
                    ]],
                )?,
                summary: vec![format!(
                    "theta={} |S|/X={:e} flagged={} q={:?} {}",
                    w.theta,
                    w.abs_sum,
                    w.flagged,
                    w.q,
                    pass_word(w.pass)
                )],
                json: to_json(&w)?,
            })
        }
        "gamma" => {
            if p.has("set") {
                let set: Vec<u64> = p.list("set")?;
                let exact = gamma_exact(&set)?;
                let g = gamma_coprimality(&set)?;
                return Ok(Outcome {
                    status: Status::Pass,
                    csv: csv_table(&["set", "gamma", "gamma_exact"], [vec![p.raw("set").into(), format!("{g:e}"), exact.to_string()]])?,
                    summary: vec![format!("gamma({{{}}}) = {exact}", p.raw("set"))],
                    json: json!({ "set": set, "gamma": g, "gamma_exact": exact.to_string() }),
                });
            }
            let x: u64 = p.get("x")?;
            let primes = sieve_primes(x)?.primes();
            let g = gamma_coprimality(&primes)?;
            let scaled = g * (x as f64).ln().ln();
            let ok = (0.1..=10.0).contains(&scaled);
            Ok(Outcome {
                status: verdict(ok),
                csv: csv_table(&["X", "primes", "gamma", "gamma_loglog"], [vec![x.to_string(), primes.len().to_string(), format!("{g:e}"), format!("{scaled:e}")]])?,
                summary: vec![format!("gamma(primes <= {x}) log log X = {scaled:.6} (band [0.1, 10]) {}", pass_word(ok))],
                json: json!({ "x": x, "primes": primes.len(), "gamma": g, "gamma_loglog": scaled }),
            })
        }
        "coprimality" => {
            let fam = AlmostPrimeFamily::new(&p.intervals("windows")?, p.get("j")?)?;
            let c = coprimality_check(&fam)?;
            let wg: Vec<_> = c.window_gammas.iter().map(|g| format!("{g:e}")).collect();
            Ok(Outcome {
                status: verdict(c.pass),
                csv: csv_table(
                    &["gamma", "gamma_product", "window_gammas", "delta", "bound", "pass"],
                    [vec![
                        format!("{:e}", c.gamma),
                        format!("{:e}", c.gamma_product),
                        wg.join(";"),
                        format!("{:e}", c.delta),
                        format!("{:e}", c.bound),
                        (c.pass as u8).to_string(),
                    ]],
                )?,
                summary: vec![format!(
                    "gamma={:.6} bound={:.6} (delta={:.6}) {}",
                    c.gamma,
                    c.bound,
                    c.delta,
                    pass_word(c.pass)
                )],
                json: to_json(&c)?,
            })
        }
        other => Err(LabError::Config(format!(
            "unknown dioph mode '{other}' (interval, family, vino, weyl, weyl-point, gamma, coprimality)"
        ))),
    }
}

/// Largest relative gap between the Ramanujan expansion and the direct
/// majorant over seeded samples of `[X, 2X)`.
fn reconstruction_error(s: &SelbergSieve, x: u64, samples: usize, seed: u64) -> f64 {
    let c = s.expand();
    let mut rng = suite_rng(seed, 0);
    (0..samples)
        .map(|_| {
            let n: u64 = rng.gen_range(x..2 * x);
            let v = s.value(n);
            (c.eval(n) - v).abs() / v.abs().max(1.0)
        })
        .fold(0.0, f64::max)
}

fn sieve(p: &Params) -> Result<Outcome> {
    let x: u64 = p.get("x")?;
    let r: f64 = if p.has("r") { p.get("r")? } else { (x as f64).powf(p.get("rexp")?) };
    let kind: Normalizer = p.raw("normalizer").parse()?;
    let dec = band_decompose(x, r, p.get("q")?, p.get("c")?, p.get("a")?, kind)?;
    let rep = verify_sieve_bounds(&dec)?;
    let recon = reconstruction_error(&SelbergSieve::new(r, kind)?, x, p.get("samples")?, p.get("seed")?);
    let checks = [
        ("reconstruction <= 1e-8", recon <= 1e-8),
        ("majorant >= 0", rep.majorant_min >= 0.0),
        ("min prime Lambda/log R >= 0.8", rep.min_prime_over_log_r >= 0.8),
        ("telescoping <= 1e-8", rep.telescoping_error <= 1e-8),
        ("Q E|h| <= 10", rep.h_mean_times_q <= 10.0),
    ];
    let mut metrics: Vec<(String, f64)> = vec![
        ("x".into(), x as f64),
        ("r".into(), r),
        ("q".into(), rep.q as f64),
        ("normalizer".into(), rep.normalizer),
        ("reconstruction_error".into(), recon),
        ("min_prime_over_log_x".into(), rep.min_prime_over_log_x),
        ("min_prime_over_log_r".into(), rep.min_prime_over_log_r),
        ("majorant_min".into(), rep.majorant_min),
        ("majorant_mean".into(), rep.majorant_mean),
        ("lam_per_mean_abs".into(), rep.lam_per_mean_abs),
        ("lam_per_sup".into(), rep.lam_per_sup),
        ("lam_per_sup_over_q2".into(), rep.lam_per_sup_over_q2),
        ("h_mean_abs".into(), rep.h_mean_abs),
        ("h_mean_times_q".into(), rep.h_mean_times_q),
        ("band_sum_ratio".into(), rep.band_sum_ratio),
        ("telescoping_error".into(), rep.telescoping_error),
        ("envelope_ratio".into(), rep.envelope_ratio),
        ("grid_size".into(), rep.grid_size as f64),
    ];
    for b in &rep.bands {
        let tag = if b.tail { "tail".to_string() } else { format!("band{}", b.index) };
        metrics.push((format!("{tag}_g_sup"), b.g_sup));
        metrics.push((format!("{tag}_g_hat_sup"), b.g_hat_sup));
        metrics.push((format!("{tag}_moment_ratio"), b.moment_ratio));
    }
    let pass = checks.iter().all(|c| c.1);
    let mut summary = vec![format!(
        "X={x} R={r:.6} Q={} bands={} min Lambda(p)/log R={:.6} Q E|h|={:.6} telescoping={:e}",
        rep.q,
        rep.bands.len(),
        rep.min_prime_over_log_r,
        rep.h_mean_times_q,
        rep.telescoping_error
    )];
    summary.extend(checks.iter().map(|(name, ok)| format!("{name}: {}", pass_word(*ok))));
    Ok(Outcome {
        status: verdict(pass),
        csv: csv_table(&["metric", "value"], metrics.iter().map(|(k, v)| vec![k.clone(), format!("{v:e}")]))?,
        json: json!({ "report": to_json(&rep)?, "reconstruction_error": recon, "pass": pass }),
        summary,
    })
}

fn richness(p: &Params) -> Result<Outcome> {
    let (c, what) = load_coloring(p)?;
    let cfg = RichnessConfig {
        v: p.get("v")?,
        imax: p.get("imax")?,
        windows: p.intervals("windows")?,
        kmax: p.get("kmax")?,
    };
    let rep = richness_scan(&c, &cfg)?;
    let mut summary = vec![
        format!("{what}: N={} selected color {} (rich counts {:?})", rep.n, rep.selected_color, rep.rich_counts),
        format!(
            "row partition identity: {} ({} rows exact)",
            pass_word(rep.partition_ok),
            rep.partition_exact_rows
        ),
    ];
    summary.extend(
        rep.pairs
            .iter()
            .map(|s| format!("pair b={} b'={} k={}: {:e}", s.b, s.b2, s.k, s.value)),
    );
    Ok(Outcome {
        status: verdict(rep.partition_ok),
        csv: with_writer(|buf| rep.write_csv(buf))?,
        json: json!({ "report": to_json(&rep)?, "config": to_json(&cfg)?, "source": what }),
        summary,
    })
}
