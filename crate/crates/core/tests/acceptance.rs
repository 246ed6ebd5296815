//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::process::{Command, ExitCode};

use costspace::cost_model::{all_cost_lines, choose_threshold, q_skew};
use costspace::curves::{
    brier_curve, brier_score, evenly_spaced_rescore, method_curve, optimal_cost_curve,
    rate_driven_closed_form, rate_driven_curve,
};
use costspace::synth::{gini_reference, Lcg};
use costspace::{
    auc, auch, generate, roc_curve, Class, ConditionKind, Execution, Family, Fixture,
    GeneratorSpec, OperatingCondition, ScoredDataset, ThresholdChoiceMethod,
};

const COST: ConditionKind = ConditionKind::CostProportion;
const SKEW: ConditionKind = ConditionKind::Skew;

/// Collects failed checks for one criterion.
#[derive(Default)]
struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn close(&mut self, what: &str, got: f64, want: f64, tol: f64) {
        self.check(
            (got - want).abs() <= tol,
            format!("{what}: got {got}, want {want} +- {tol}"),
        );
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }
}

fn fixture(f: Fixture) -> ScoredDataset {
    generate(&GeneratorSpec::fixture(f)).unwrap()
}

/// Rate-driven area by brute force: for bracket `k` the `k` lowest-scored
/// samples are predicted positive. Only valid without ties.
fn rate_driven_area_oracle(d: &ScoredDataset) -> f64 {
    let mut s: Vec<(f64, usize)> = d.samples().iter().map(|x| (x.score, x.label.index())).collect();
    s.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = s.len();
    let (n0, n1) = (d.n0() as f64, d.n1() as f64);
    let (pi0, pi1) = (n0 / n as f64, n1 / n as f64);
    let mut area = 0.0;
    for k in 0..=n {
        let pos0 = s[..k].iter().filter(|x| x.1 == 0).count() as f64;
        let pos1 = s[..k].iter().filter(|x| x.1 == 1).count() as f64;
        let (f0, f1) = (pos0 / n0, pos1 / n1);
        let q = |c: f64| 2.0 * (c * pi0 * (1.0 - f0) + (1.0 - c) * pi1 * f1);
        let (a, b) = (k as f64 / (n + 1) as f64, (k + 1) as f64 / (n + 1) as f64);
        area += (b - a) * (q(a) + q(b)) / 2.0;
    }
    area
}

/// Mann-Whitney count: P(s0 < s1) + P(s0 = s1) / 2.
fn pairwise_auc(d: &ScoredDataset) -> f64 {
    let by = |k: Class| -> Vec<f64> {
        d.samples().iter().filter(|s| s.label == k).map(|s| s.score).collect()
    };
    let (s0, s1) = (by(Class::Positive), by(Class::Negative));
    let mut wins = 0.0;
    for a in &s0 {
        for b in &s1 {
            if a < b {
                wins += 1.0;
            } else if a == b {
                wins += 0.5;
            }
        }
    }
    wins / (s0.len() * s1.len()) as f64
}

fn criterion_1() -> Checks {
    let mut c = Checks::default();
    let d = fixture(Fixture::Fig2);
    let a = auc(&d).unwrap();
    c.close("AUC", a, 0.833333, 1e-6);
    let area = rate_driven_curve(&d, COST).area();
    let oracle = rate_driven_area_oracle(&d);
    c.close("oracle", oracle, 0.169643, 1e-6);
    c.close("rate-driven area vs oracle", area, oracle, 1e-6);
    c.close("rate-driven area vs 0.1695", area, 0.1695, 2e-4);
    c.close("closed form", rate_driven_closed_form(d.pi0(), d.pi1(), a), 0.170068, 1e-6);
    c.note(format!("auc={a:.6} area={area:.6}"));
    c
}

fn criterion_2() -> Checks {
    let mut c = Checks::default();
    let d = fixture(Fixture::Fig6);
    let a = auc(&d).unwrap();
    c.close("AUC", a, 0.7778, 1e-3);
    let bs = brier_score(&d).unwrap().bs;
    c.close("Brier score", bs, 0.2047101, 1e-6);
    let area = brier_curve(&d, COST).unwrap().area();
    c.close("Brier-curve area vs BS", area, bs, 1e-9);
    let cf = rate_driven_closed_form(d.pi0(), d.pi1(), a);
    c.close("closed form", cf, 0.203125, 1e-5);
    c.note(format!("bs={bs:.7} brier_area={area:.7} closed_form={cf:.6}"));
    c
}

fn criterion_3() -> Checks {
    let mut c = Checks::default();
    let d = fixture(Fixture::Fig1);
    let roc = roc_curve(&d).unwrap();
    c.check(roc.points().len() == 12, format!("ROC points {}", roc.points().len()));
    c.check(roc.segments() == 11, format!("ROC segments {}", roc.segments()));
    let hull = roc.convex_hull().segments();
    c.check(hull == 5, format!("hull segments {hull}"));
    let lines = all_cost_lines(&d, SKEW).len();
    c.check(lines == 12, format!("cost lines {lines}"));
    c.close("Q_sk(0.92, 0.8)", q_skew(&d, 0.92, 0.8), 0.15, 1e-9);
    c.close("Q_sk(0.85, 0.8)", q_skew(&d, 0.85, 0.8), 0.17273, 1e-4);
    let t = choose_threshold(&d, &ThresholdChoiceMethod::Optimal, OperatingCondition::skew(0.8).unwrap())
        .unwrap();
    c.check(
        (t.lo - 0.90).abs() < 1e-12 && (t.hi - 0.95).abs() < 1e-12,
        format!("optimal interval at z = 0.8 is {t}"),
    );
    c.note(format!("optimal interval {t}"));
    c
}

fn criterion_4() -> Checks {
    let mut c = Checks::default();
    let gen = |f| generate(&GeneratorSpec::new(f, 1000, 1000)).unwrap();
    let targets = [
        (Family::Perfect, "perfect", 1.0 / 12.0),
        (Family::Alternating, "alternating", 1.0 / 3.0),
        (Family::Worst, "worst", 7.0 / 12.0),
    ];
    for (family, name, want) in targets {
        let area = rate_driven_curve(&gen(family), SKEW).area();
        c.close(&format!("{name} rate-driven skew area"), area, want, 0.01);
        c.note(format!("{name}={area:.5}"));
    }
    let worst = generate(&GeneratorSpec::new(Family::Worst, 20, 20)).unwrap();
    c.close("worst optimal skew area", optimal_cost_curve(&worst, SKEW).area(), 0.25, 1e-9);
    let alt = rate_driven_curve(&gen(Family::Alternating), SKEW);
    let sup = alt.sup_distance(gini_reference, 10_001, Execution::default());
    c.check(sup <= 0.01, format!("alternating sup-distance to 2c(1-c) = {sup}"));
    c.note(format!("sup={sup:.5}"));
    c
}

/// 100 datasets with `n <= 200`, scores on a coarse grid so ties are common.
fn corpus() -> Vec<ScoredDataset> {
    let mut rng = Lcg::new(20_240_601);
    let mut out = Vec::new();
    while out.len() < 100 {
        let n = 2 + (rng.next_u64() % 199) as usize;
        let levels = 2 + (rng.next_u64() % 40) as usize;
        let pi0 = 0.1 + 0.8 * rng.next_f64();
        let mut scores = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let label = u8::from(rng.next_f64() >= pi0);
            // class 1 drifts towards high scores
            let raw = (rng.next_f64() + 0.3 * label as f64).min(1.0);
            scores.push((raw * levels as f64).floor() / levels as f64);
            labels.push(label);
        }
        let d = ScoredDataset::from_scores(&scores, &labels).unwrap();
        if d.n0() > 0 && d.n1() > 0 {
            out.push(d);
        }
    }
    out
}

fn balanced(d: &ScoredDataset) -> ScoredDataset {
    let keep = d.n0().min(d.n1());
    let mut seen = [0usize; 2];
    let samples = d
        .samples()
        .iter()
        .filter(|s| {
            let k = s.label.index();
            seen[k] += 1;
            seen[k] <= keep
        })
        .copied()
        .collect();
    ScoredDataset::new(samples).unwrap()
}

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
const SIZES: [usize; 3] = [10, 100, 1000];

fn criterion_5() -> Checks {
    let mut c = Checks::default();
    let corpus = corpus();
    let ties = corpus.iter().filter(|d| d.distinct_scores() < d.len()).count();
    c.check(ties >= 90, format!("only {ties} corpus datasets have ties"));
    let grid: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();

    for (i, d) in corpus.iter().enumerate() {
        // (a) envelope dominance
        for kind in [COST, SKEW] {
            let opt = optimal_cost_curve(d, kind);
            let lines = all_cost_lines(d, kind);
            let others: Vec<_> = [
                ThresholdChoiceMethod::RateDriven,
                ThresholdChoiceMethod::Probabilistic,
                ThresholdChoiceMethod::ScoreFixed(0.5),
                ThresholdChoiceMethod::RateFixed(0.3),
            ]
            .iter()
            .map(|m| method_curve(d, m, kind).unwrap())
            .collect();
            for &v in &grid {
                let o = opt.eval(v);
                let lowest = lines.iter().map(|l| l.eval(v)).fold(f64::INFINITY, f64::min);
                c.check((o - lowest).abs() <= 1e-12, format!("(a) #{i} {kind} v={v}: envelope {o} vs min line {lowest}"));
                for curve in &others {
                    c.check(o <= curve.eval(v) + 1e-12, format!("(a) #{i} {kind} v={v}: above {}", curve.label()));
                }
            }
        }
        // (b) trapezoid AUC = pairwise count
        let a = auc(d).unwrap();
        let pw = pairwise_auc(d);
        c.check((a - pw).abs() <= 1e-12, format!("(b) #{i}: auc {a} vs pairwise {pw}"));
        // (c) AUCH >= AUC
        let h = auch(d).unwrap();
        c.check(h >= a - 1e-12, format!("(c) #{i}: auch {h} < auc {a}"));
        // (e) Brier-curve area = Brier score, both kinds
        let bs = brier_score(d).unwrap();
        let cost_area = brier_curve(d, COST).unwrap().area();
        let skew_area = brier_curve(d, SKEW).unwrap().area();
        c.check((cost_area - bs.bs).abs() <= 1e-9, format!("(e) #{i}: {cost_area} vs {}", bs.bs));
        let half = 0.5 * (bs.bs0 + bs.bs1);
        c.check((skew_area - half).abs() <= 1e-9, format!("(e) #{i} skew: {skew_area} vs {half}"));
        // (f) balanced data: cost and skew curves coincide
        let b = balanced(d);
        for m in [
            ThresholdChoiceMethod::Optimal,
            ThresholdChoiceMethod::RateDriven,
            ThresholdChoiceMethod::Probabilistic,
        ] {
            let x = method_curve(&b, &m, COST).unwrap();
            let y = method_curve(&b, &m, SKEW).unwrap();
            c.check(x.segments() == y.segments(), format!("(f) #{i} {m}: cost and skew curves differ"));
        }
    }

    // (d) and (g): random rankers, gap to the closed form per seed
    for seed in SEEDS {
        let mut rate_gaps = Vec::new();
        let mut brier_gaps = Vec::new();
        for n in SIZES {
            let d = generate(&GeneratorSpec::random(n / 2, n / 2, seed)).unwrap();
            let a = auc(&d).unwrap();
            let cf = rate_driven_closed_form(d.pi0(), d.pi1(), a);
            rate_gaps.push((rate_driven_curve(&d, COST).area() - cf).abs());
            let r = evenly_spaced_rescore(&d).unwrap();
            let cf_r = rate_driven_closed_form(r.pi0(), r.pi1(), auc(&r).unwrap());
            brier_gaps.push((brier_score(&r).unwrap().bs - cf_r).abs());
        }
        for (tag, gaps) in [("(d)", &rate_gaps), ("(g)", &brier_gaps)] {
            c.check(gaps[2] <= 0.01, format!("{tag} seed {seed}: gap {} at n=1000", gaps[2]));
            c.check(
                gaps[0] > gaps[1] && gaps[1] > gaps[2],
                format!("{tag} seed {seed}: gaps {gaps:?} not shrinking"),
            );
            c.note(format!(
                "{tag} seed {seed}: {}",
                gaps.iter().map(|g| format!("{g:.2e}")).collect::<Vec<_>>().join(" > ")
            ));
        }
    }
    c
}

fn run_twice(args: &[&str], outputs: &[&std::path::Path]) -> Result<(), String> {
    let bin = env!("CARGO_BIN_EXE_costspace");
    let mut runs = Vec::new();
    for _ in 0..2 {
        let out = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
        }
        let mut bytes = out.stdout;
        for p in outputs {
            bytes.extend(std::fs::read(p).map_err(|e| format!("{}: {e}", p.display()))?);
            std::fs::remove_file(p).map_err(|e| e.to_string())?;
        }
        runs.push(bytes);
    }
    if runs[0] != runs[1] {
        return Err(format!("{args:?}: outputs differ between runs"));
    }
    Ok(())
}

fn criterion_6() -> Checks {
    let mut c = Checks::default();
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name);
    let s = |p: &std::path::Path| p.to_str().unwrap().to_string();
    let mut inputs = Vec::new();
    for f in Fixture::ALL {
        let p = path(&format!("{f}.csv"));
        c.check(
            run_twice(&["synth", "--fixture", f.name(), "--out", &s(&p)], &[&p]).is_ok(),
            format!("synth {f} not deterministic"),
        );
        let status = Command::new(env!("CARGO_BIN_EXE_costspace"))
            .args(["synth", "--fixture", f.name(), "--out", &s(&p)])
            .status()
            .unwrap();
        c.check(status.success(), format!("synth {f} failed"));
        inputs.push(p);
    }
    let random = ["synth", "--family", "random", "--n0", "50", "--n1", "50", "--seed", "7"];
    if let Err(e) = run_twice(&random, &[]) {
        c.check(false, e);
    }
    let svg = path("plot.svg");
    let json = path("plot.json");
    for input in &inputs {
        let i = s(input);
        let runs: Vec<(Vec<&str>, Vec<&std::path::Path>)> = vec![
            (vec!["metrics", &i, "--methods", "fixed:0.5,rate:0.3"], vec![]),
            (vec!["curves", &i, "--space", "roc", "--out", svg.to_str().unwrap()], vec![&svg, &json]),
            (
                vec!["curves", &i, "--space", "cost", "--methods", "optimal,rate-driven,prob,fixed:0.5", "--out", svg.to_str().unwrap()],
                vec![&svg, &json],
            ),
            (
                vec!["curves", &i, "--space", "skew", "--methods", "optimal,rate-driven,prob,rate:0.4", "--out", svg.to_str().unwrap()],
                vec![&svg, &json],
            ),
        ];
        for (args, outs) in runs {
            if let Err(e) = run_twice(&args, &outs) {
                c.check(false, e);
            }
        }
    }
    let all: Vec<String> = inputs.iter().map(|p| s(p)).collect();
    let mut args = vec!["compare", "--method", "rate-driven", "--space", "skew"];
    args.extend(all.iter().map(String::as_str));
    if let Err(e) = run_twice(&args, &[]) {
        c.check(false, e);
    }
    c
}

type Criterion = (&'static str, fn() -> Checks);

fn main() -> ExitCode {
    let criteria: [Criterion; 6] = [
        ("1 fig2 AUC, rate-driven area and closed form", criterion_1),
        ("2 fig6 Brier score, Brier-curve area and closed form", criterion_2),
        ("3 fig1 ROC, hull, cost lines, skew losses and optimal threshold", criterion_3),
        ("4 limit values of perfect, alternating and worst rankers", criterion_4),
        ("5 property suites (a)-(g)", criterion_5),
        ("6 CLI determinism", criterion_6),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let c = run();
        let verdict = if c.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {name}");
        for n in &c.notes {
            println!("    {n}");
        }
        for f in c.failures.iter().take(10) {
            println!("    failed: {f}");
        }
        if c.failures.len() > 10 {
            println!("    ... {} more failures", c.failures.len() - 10);
        }
        failed += usize::from(!c.failures.is_empty());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
