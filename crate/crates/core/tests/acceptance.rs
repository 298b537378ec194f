//! Acceptance criteria 1 to 7. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qconv_core::cli::verify;
use qconv_core::involution::GammaMap;
use qconv_core::moments::{
    m4_sum_analytic, m4_sum_operator, moment_pair_partitions, pair_partition_polynomial, sweep,
    theorem_check, uniform_grid, PipelineConfig, Verdict,
};
use qconv_core::qspecial::{DensityModel, QContext};
use qconv_core::transform::WCoefficients;

type Criterion = fn(&mut Outcome);

const Q_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

struct Outcome {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }

    fn within(&mut self, elapsed: Duration, limit: Duration) {
        self.note(format!("{:.2}s", elapsed.as_secs_f64()));
        self.check(
            elapsed < limit,
            format!("runtime {:.2}s exceeds {:.0}s", elapsed.as_secs_f64(), limit.as_secs_f64()),
        );
    }
}

/// `int f dnu_q` by the trapezoid rule in `x = L cos(theta)`; the integrand is
/// smooth and periodic in `theta`, so the rule converges geometrically.
fn trapezoid_moment(density: &DensityModel, l: f64, m: i32, n: usize) -> f64 {
    let h = PI / n as f64;
    (1..n)
        .map(|i| {
            let t = i as f64 * h;
            let x = l * t.cos();
            density.evaluate(x) * x.powi(m) * l * t.sin()
        })
        .sum::<f64>()
        * h
}

fn criterion_1(out: &mut Outcome) {
    let start = Instant::now();
    let poly = pair_partition_polynomial(4).unwrap();
    out.check(poly == vec![2, 1], format!("pair partitions of 4: {poly:?}, expected [2, 1]"));
    for q in Q_GRID {
        let op = m4_sum_operator(q, 6).unwrap();
        let target = 8.0 + 4.0 * q;
        out.check((op - target).abs() <= 1e-10, format!("q={q}: operator {op} vs {target}"));
        let pp = 4.0 * moment_pair_partitions(4, q).unwrap();
        out.check((pp - target).abs() <= 1e-12, format!("q={q}: partitions {pp} vs {target}"));
        out.check(m4_sum_analytic(q) == target, format!("q={q}: analytic"));
    }
    out.within(start.elapsed(), Duration::from_secs(1));
}

fn criterion_2(out: &mut Outcome) {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for q in Q_GRID {
        let ctx = QContext::new(q).unwrap();
        let density = DensityModel::new(&ctx);
        let l = ctx.support();
        for (m, target) in [(0, 1.0), (2, 1.0), (4, 2.0 + q)] {
            let v = trapezoid_moment(&density, l, m, 2048);
            worst = worst.max((v - target).abs());
            out.check((v - target).abs() <= 1e-8, format!("q={q}: moment {m} = {v}, expected {target}"));
        }
    }
    out.note(format!("max moment error {worst:.1e}"));
    out.within(start.elapsed(), Duration::from_secs(10));
}

fn criterion_3(out: &mut Outcome) {
    for q in [0.1, 0.5, 0.9] {
        let start = Instant::now();
        let gamma = GammaMap::new(&QContext::new(q).unwrap());
        let l = gamma.ctx().support();
        let mut involution: f64 = 0.0;
        for i in 1..=200 {
            let x = -l + 2.0 * l * i as f64 / 201.0;
            let y = gamma.eval(x).unwrap();
            involution = involution.max((gamma.eval(y).unwrap() - x).abs());
        }
        out.check(involution < 1e-6, format!("q={q}: involution residual {involution:.2e}"));
        let push = gamma.check_pushforward(8).unwrap().max_discrepancy;
        out.check(push < 1e-7, format!("q={q}: pushforward discrepancy {push:.2e}"));
        let mut ode: f64 = 0.0;
        for i in 0..20 {
            let frac = 0.05 + 0.9 * i as f64 / 19.0;
            let x = if i % 2 == 0 { frac * l } else { -frac * l };
            ode = ode.max(gamma.ode_residual(x, 1e-4).unwrap().abs());
        }
        out.check(ode < 1e-5, format!("q={q}: ODE residual {ode:.2e}"));
        out.note(format!("q={q}: involution {involution:.1e}, pushforward {push:.1e}, ODE {ode:.1e}"));
        out.within(start.elapsed(), Duration::from_secs(10));
    }
}

fn criterion_4(out: &mut Outcome) {
    for q in [0.1, 0.5, 0.9] {
        let start = Instant::now();
        let gamma = GammaMap::new(&QContext::new(q).unwrap());
        let w = WCoefficients::build_with(&gamma, 24, 256).unwrap();
        out.check((w.w(0, 0) - 1.0).abs() <= 1e-10, format!("q={q}: w00 = {}", w.w(0, 0)));
        let mut parity: f64 = 0.0;
        for k in 0..=24 {
            for n in 0..=24 {
                if (k + n) % 2 == 1 {
                    parity = parity.max(w.w(k, n).abs());
                }
            }
        }
        out.check(parity < 1e-10, format!("q={q}: parity residual {parity:.2e}"));
        let norm: f64 = (0..=24).map(|k| w.w(k, 1).powi(2) * w.factorial(k)).sum();
        out.check(
            (norm - 1.0).abs() <= 1e-6,
            format!("q={q}: sum_k w_k1^2 [k]! = {norm:.6}"),
        );
        let mut unitarity: f64 = 0.0;
        for i in 0..=12 {
            for j in 0..=12 {
                let g: f64 = (0..=24).map(|k| w.w(k, i) * w.w(k, j) * w.factorial(k)).sum();
                let target = if i == j { w.factorial(i) } else { 0.0 };
                unitarity = unitarity.max((g - target).abs() / (w.factorial(i) * w.factorial(j)).sqrt());
            }
        }
        out.check(unitarity <= 1e-6, format!("q={q}: Gram-unitarity residual {unitarity:.3e}"));
        out.note(format!(
            "q={q}: norm {norm:.6}, unitarity {unitarity:.2e}, completed {:.1e}",
            w.diagnostics().direct_unitarity
        ));
        out.within(start.elapsed(), Duration::from_secs(10));
    }
}

fn criterion_5(out: &mut Outcome) {
    for q in Q_GRID {
        let start = Instant::now();
        let r = theorem_check(q).unwrap();
        let d = &r.diagnostics;
        out.check(d.verdict == Verdict::Strict, format!("q={q}: verdict {:?}", d.verdict));
        out.check(r.s_of_q < q, format!("q={q}: S = {} not below q", r.s_of_q));
        out.check(r.margin > r.tail_bound, format!("q={q}: margin {} vs tail {}", r.margin, r.tail_bound));
        let analytic = 8.0 + 2.0 * q + 2.0 * r.s_of_q;
        out.check((r.m4_gamma - analytic).abs() <= 1e-12, format!("q={q}: m4_gamma {}", r.m4_gamma));
        let gap = (d.m4_gamma_operator - r.m4_gamma).abs();
        out.check(
            gap <= 1e-5 + r.tail_bound,
            format!("q={q}: analytic and operator routes differ by {gap:.2e}"),
        );
        out.check(
            d.decomposition_residual < 1e-8,
            format!("q={q}: decomposition residual {:.2e}", d.decomposition_residual),
        );
        if q == 0.5 {
            out.check((r.m4_gamma - 9.18).abs() <= 0.1, format!("m4_gamma(0.5) = {}", r.m4_gamma));
            out.note(format!("m4_gamma(0.5) = {:.5}", r.m4_gamma));
        }
        if q == 0.8 {
            out.check((r.m4_gamma - 10.0).abs() <= 0.1, format!("m4_gamma(0.8) = {}", r.m4_gamma));
            out.note(format!("m4_gamma(0.8) = {:.5}", r.m4_gamma));
        }
        out.within(start.elapsed(), Duration::from_secs(30));
    }
}

fn criterion_6(out: &mut Outcome) {
    let start = Instant::now();
    let rows = sweep(&uniform_grid(0.02, 0.98, 50), &PipelineConfig::default());
    out.within(start.elapsed(), Duration::from_secs(300));
    out.check(rows.len() == 50, format!("{} rows", rows.len()));
    for r in &rows {
        out.check(r.error.is_none(), format!("q={}: {:?}", r.q, r.error));
        out.check(r.margin > 0.0, format!("q={}: margin {}", r.q, r.margin));
        let gap = 2.0 * (r.q - r.s);
        out.check(
            (gap - (r.m4_sum - r.m4_gamma)).abs() <= 1e-9,
            format!("q={}: gap identity off by {:.2e}", r.q, gap - (r.m4_sum - r.m4_gamma)),
        );
    }
    let first = &rows[0];
    out.check(
        (first.m4_sum - 8.0).abs() < 0.1 && (first.m4_gamma - 8.0).abs() < 0.1,
        format!("at q={} curves are {} and {}", first.q, first.m4_sum, first.m4_gamma),
    );
    let rising = rows.windows(2).all(|p| p[0].m4_sum < p[1].m4_sum && p[0].m4_gamma < p[1].m4_gamma);
    out.check(rising, "curves are not increasing in q");
    let min_margin = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    out.note(format!("min margin {min_margin:.3e}"));
}

fn criterion_7(out: &mut Outcome) {
    let start = Instant::now();
    for q in [0.1, 0.5, 0.9] {
        let report = verify(q, 6, &PipelineConfig::default()).unwrap();
        out.note(format!("q={q}: {}/{} items pass", report.items.iter().filter(|i| i.pass).count(), report.items.len()));
        for item in report.failures() {
            out.check(false, format!("q={q}: {} = {:.3e} (tolerance {:.1e})", item.name, item.value, item.tolerance));
        }
    }
    out.within(start.elapsed(), Duration::from_secs(60));
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 7] = [
        ("1 fourth moment of the sum", criterion_1),
        ("2 density sanity", criterion_2),
        ("3 gamma suite", criterion_3),
        ("4 w-matrix suite", criterion_4),
        ("5 theorem reproduction", criterion_5),
        ("6 sweep", criterion_6),
        ("7 structural suite", criterion_7),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let mut out = Outcome::new();
        run(&mut out);
        let verdict = if out.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {name}: {verdict} [{}]", out.notes.join("; "));
        for f in &out.failures {
            println!("    {f}");
        }
        if !out.failures.is_empty() {
            failed += 1;
        }
    }
    println!("acceptance: {} of 7 criteria pass", 7 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
