//! End-to-end acceptance run. Prints one line per criterion and exits
//! nonzero if any criterion fails or overruns its time budget.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use higgs_ks::builtin::p1_nilpotent;
use higgs_ks::cech::{cech_h1, euler_characteristic, Cover, DegreeWindow, HiggsComplex, SheafComplex};
use higgs_ks::report::Status;
use higgs_ks::verify::{Proposition, VerifyOptions};

struct Criterion {
    id: u8,
    budget: Duration,
    min_cases: usize,
}

const fn crit(id: u8, secs: u64, min_cases: usize) -> Criterion {
    Criterion {
        id,
        budget: Duration::from_secs(secs),
        min_cases,
    }
}

/// Time budget in seconds and minimum case count for each criterion.
const CRITERIA: [Criterion; 10] = [
    crit(1, 5, 100),
    crit(2, 10, 50),
    crit(3, 10, 50),
    crit(4, 5, 100),
    crit(5, 5, 4 * 4),
    crit(6, 10, 13),
    crit(7, 20, 2),
    crit(8, 30, 2 * 50),
    crit(9, 20, 3 * 50),
    crit(10, 60, 50),
];

/// H¹(O(d)) on the two-chart cover as monomials `u^k` of the overlap that
/// lie in neither restriction image: `U` gives `u^k` with `k ≤ 0`, `V`
/// gives `u^{-d} u^j` with `j ≥ 0`.
fn monomial_h1(d: i32) -> usize {
    let range = -(d.abs() + 4)..=(d.abs() + 4);
    let from_u: BTreeSet<i32> = range.clone().filter(|&k| k <= 0).collect();
    let from_v: BTreeSet<i32> = range.clone().filter(|&k| k >= -d).collect();
    range.filter(|k| !from_u.contains(k) && !from_v.contains(k)).count()
}

/// χ of the Higgs complex of a split bundle with nilpotent field, summing
/// `χ(O(e)) = e + 1` over `End E` and `End E ⊗ O(−2)`.
fn riemann_roch_chi(degrees: &[i32]) -> i64 {
    let chi_line = |e: i32| (e + 1) as i64;
    let mut end = 0;
    let mut end_omega = 0;
    for a in degrees {
        for b in degrees {
            end += chi_line(a - b);
            end_omega += chi_line(a - b - 2);
        }
    }
    end - end_omega
}

fn line_bundles_direct() -> Result<usize, String> {
    let cover = Cover::projective_line();
    let mut cases = 0;
    for d in -6..=6 {
        let cx = SheafComplex::line_bundle(&cover, d).map_err(|e| e.to_string())?;
        let w = DegreeWindow::for_complex(&cx);
        // cech_h1 errors if widening the window changes the answer
        let dim = cech_h1(&cx, &w).map_err(|e| format!("d = {d}: {e}"))?.dim;
        let want = monomial_h1(d);
        let formula = (-d - 1).max(0) as usize;
        if dim != want || want != formula {
            return Err(format!("d = {d}: solver {dim}, monomials {want}, formula {formula}"));
        }
        cases += 1;
    }
    Ok(cases)
}

fn euler_direct() -> Result<usize, String> {
    let oracle = riemann_roch_chi(&[1, -1]);
    if oracle != 8 {
        return Err(format!("Riemann-Roch sum gives {oracle}"));
    }
    let mut cases = 0;
    for cover in [Cover::projective_line(), Cover::projective_line_three()] {
        let cx = HiggsComplex::new(&p1_nilpotent(&cover)).map_err(|e| e.to_string())?;
        let (chi, dims) = euler_characteristic(&cx, &DegreeWindow::for_complex(&cx)).map_err(|e| e.to_string())?;
        if chi != oracle {
            return Err(format!("{} charts: solver {chi} from {dims:?}", cover.n_charts()));
        }
        cases += 1;
    }
    Ok(cases)
}

fn run_criterion(c: &Criterion, opts: &VerifyOptions) -> (bool, String) {
    let start = Instant::now();
    let p = Proposition::by_id(c.id).expect("known proposition");
    let rec = p.run(opts);
    let cases = rec.values.get("cases").and_then(|v| v.as_u64()).unwrap_or(0) as usize;
    let mut ok = rec.status == Status::Pass && cases >= c.min_cases;
    let mut detail = format!("{} cases", cases);
    if let Some(m) = &rec.message {
        detail.push_str(&format!("; {m}"));
    }
    let extra = match c.id {
        6 => Some(line_bundles_direct()),
        7 => Some(euler_direct()),
        _ => None,
    };
    if let Some(r) = extra {
        match r {
            Ok(n) => detail.push_str(&format!(", {n} direct")),
            Err(e) => {
                ok = false;
                detail.push_str(&format!("; direct check: {e}"));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed > c.budget {
        ok = false;
        detail.push_str(&format!("; over budget {:?}", c.budget));
    }
    (ok, format!("{} {:.2}s, {detail}", p.name, elapsed.as_secs_f64()))
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_higgs-ks"))
        .args(args)
        .output()
        .expect("run higgs-ks")
}

fn verify_paper_cli() -> (bool, String) {
    let start = Instant::now();
    let a = cli(&["verify-paper", "--format", "structured", "--seed", "7"]);
    let b = cli(&["verify-paper", "--format", "structured", "--seed", "7"]);
    if a.status.code() != Some(0) {
        return (
            false,
            format!("exit {:?}: {}", a.status.code(), String::from_utf8_lossy(&a.stdout)),
        );
    }
    if a.stdout != b.stdout {
        return (false, "structured output differs between runs".into());
    }
    let flip = cli(&["verify-paper", "--debug-flip-sign"]);
    let text = String::from_utf8_lossy(&flip.stdout);
    if flip.status.code() != Some(1) {
        return (false, format!("flipped sign exited {:?}", flip.status.code()));
    }
    let Some(witness) = text
        .lines()
        .find(|l| l.contains("witness:") && l.contains("p1-nilpotent"))
    else {
        return (false, "flipped sign failed without a named witness".into());
    };
    (
        true,
        format!(
            "verify-paper {:.2}s, exit 0, byte-stable; flipped sign exits 1 ({}...)",
            start.elapsed().as_secs_f64(),
            witness.trim().chars().take(60).collect::<String>()
        ),
    )
}

fn main() {
    let opts = VerifyOptions::default();
    let mut failures = 0;
    for c in &CRITERIA {
        let (ok, line) = run_criterion(c, &opts);
        failures += usize::from(!ok);
        println!("criterion {:>2}: {} {line}", c.id, if ok { "PASS" } else { "FAIL" });
    }
    let (ok, line) = verify_paper_cli();
    failures += usize::from(!ok);
    println!("criterion 11: {} {line}", if ok { "PASS" } else { "FAIL" });
    if failures > 0 {
        eprintln!("{failures} criteria failed");
        std::process::exit(1);
    }
}
