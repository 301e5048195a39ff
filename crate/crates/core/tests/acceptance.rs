use propcalc::cli::{run, Report, Status, Suite, SuiteConfig};

struct Criterion {
    n: usize,
    title: &'static str,
    suite: Suite,
    budget_ms: u64,
    /// checks whose names contain these must be present
    required: &'static [&'static str],
}

const CRITERIA: [Criterion; 10] = [
    Criterion { n: 1, title: "d² = 0 on cobar, resolution and cylinder", suite: Suite::CobarD2, budget_ms: 60_000, required: &["/cobar", "/two-colored-resolution", "/cylinder"] },
    Criterion { n: 2, title: "ρ, Φ, Ψ chain maps and Ψ∘Φ = fold", suite: Suite::Maps, budget_ms: 30_000, required: &["rho-phi-psi"] },
    Criterion { n: 3, title: "shifted L∞ Jacobi on 𝔨, 𝔥 and twisted algebras", suite: Suite::Linf, budget_ms: 180_000, required: &["/k/jacobi-4", "/h/jacobi-4", "/k-twisted/jacobi-4", "/h-twisted/jacobi-4", "/kbar-f/jacobi-4"] },
    Criterion { n: 4, title: "filtration levels, sub-additivity and the example graph", suite: Suite::Filtration, budget_ms: 60_000, required: &["example-graph", "/subadditivity", "/levels"] },
    Criterion { n: 5, title: "MC correspondence in 𝔨 and 𝔥", suite: Suite::McCorrespondence, budget_ms: 60_000, required: &["three-way"] },
    Criterion { n: 6, title: "twisting by MC elements", suite: Suite::Twisting, budget_ms: 60_000, required: &["mc-shift", "twisted-jacobi"] },
    Criterion { n: 7, title: "enrichment laws and the continuity control", suite: Suite::Enrichment, budget_ms: 180_000, required: &["L1-residual", "L2-associativity", "L3-unit", "mc-image-is-composite", "not-continuous"] },
    Criterion { n: 8, title: "pullback and pushout along ∞-morphisms", suite: Suite::Pullback, budget_ms: 120_000, required: &["f-upper-star", "f-lower-star", "associated-graded"] },
    Criterion { n: 9, title: "polynomial forms, MC_0 and a homotopy certificate", suite: Suite::Integration, budget_ms: 60_000, required: &["forms/dg-algebra", "mc0-is-mc", "binary_w2/homotopy", "kbar-projection"] },
    Criterion { n: 10, title: "Stasheff relations from the A∞-style table", suite: Suite::Cooperad, budget_ms: 60_000, required: &["ainfty/stasheff"] },
];

fn evaluate(c: &Criterion, report: &Report) -> Result<String, String> {
    let checks: Vec<_> = report.checks.iter().filter(|k| k.suite == c.suite).collect();
    if let Some(bad) = checks.iter().find(|k| k.status == Status::Fail) {
        return Err(format!("{} failed: {} {:?}", bad.name, bad.detail, bad.counterexample));
    }
    for r in c.required {
        if !checks.iter().any(|k| k.name.contains(r) && k.status == Status::Pass && k.cases > 0) {
            return Err(format!("no passing check matching `{r}`"));
        }
    }
    let ms: u64 = checks.iter().map(|k| k.elapsed_ms).sum();
    if ms > c.budget_ms {
        return Err(format!("took {ms} ms, budget {} ms", c.budget_ms));
    }
    let cases: usize = checks.iter().map(|k| k.cases).sum();
    Ok(format!("{} checks, {cases} cases, {ms} ms", checks.len()))
}

fn main() -> std::process::ExitCode {
    let report = run(&SuiteConfig::default()).expect("default run");
    let control = run(&SuiteConfig { suites: vec![Suite::Linf], negative_control: true, ..SuiteConfig::default() }).expect("control run");
    let mut failed = Vec::new();
    for c in &CRITERIA {
        let mut outcome = evaluate(c, &report);
        if c.suite == Suite::Linf && outcome.is_ok() && control.suite_passed(Suite::Linf) {
            outcome = Err("corrupted brackets were not detected".into());
        }
        match outcome {
            Ok(s) => println!("criterion {:>2} PASS  {} ({s})", c.n, c.title),
            Err(e) => {
                println!("criterion {:>2} FAIL  {}: {e}", c.n, c.title);
                failed.push(c.n);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", CRITERIA.len());
        std::process::ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::ExitCode::FAILURE
    }
}
