//! Numbered acceptance criteria and their checks.

use lambda_mixer_core::validation::{self, CheckResult};

pub struct Criterion {
    pub number: u8,
    pub title: &'static str,
    pub check: fn() -> CheckResult,
}

/// Criteria 1 to 9; criterion 10 is the `validate` command as a whole.
pub const CRITERIA: [Criterion; 9] = [
    Criterion { number: 1, title: "gradient-oracle equivalence", check: validation::check_gradient_oracle },
    Criterion { number: 2, title: "perturbation order", check: validation::check_perturbation_order },
    Criterion { number: 3, title: "conservation drift", check: validation::check_conservation },
    Criterion { number: 4, title: "no-phase invariant", check: validation::check_c4_regimes },
    Criterion { number: 5, title: "with-phase conversion length", check: validation::check_with_phase_length },
    Criterion { number: 6, title: "no-phase conversion length", check: validation::check_no_phase_length },
    Criterion { number: 7, title: "efficiency limits", check: validation::check_efficiency_limits },
    Criterion { number: 8, title: "sweep scaling", check: validation::check_sweep_scaling },
    Criterion { number: 9, title: "five-level cancellation", check: validation::check_five_level_cancellation },
];

/// One PASS/FAIL line for a finished check.
pub fn status_line(number: u8, title: &str, r: &CheckResult) -> String {
    let mut line = format!(
        "{} [{number:>2}] {title}: measured {:.4e}, tolerance {:.4e}, {:.2} s of {} s",
        if r.passed { "PASS" } else { "FAIL" },
        r.measured,
        r.tolerance,
        r.runtime_s,
        r.budget_s
    );
    if !r.values.is_empty() {
        let values: Vec<String> = r.values.iter().map(|(k, v)| format!("{k}={v:.6e}")).collect();
        line.push_str(&format!("\n       {}", values.join(", ")));
    }
    if !r.passed {
        line.push_str(&format!("\n       {}", r.detail));
    }
    line
}
