//! Full stability-margin report for both feedback modes: maximum phase
//! jump (curve geometry and simulation bisection), maximum sustainable
//! frequency ramp rate, critical clearing time, and the equal-area
//! diagnostic for the 0.5 pu dip.
//!
//! ```bash
//! cargo run --release --example stability_margins [p_set]
//! ```

use gfc_stability::analysis::{margin_report, MarginScenario};
use gfc_stability::cli::margins_table;
use gfc_stability::defaults;
use gfc_stability::types::FeedbackMode;

fn main() {
    let p_set: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("a number"))
        .unwrap_or(0.8);
    let mut gfc = defaults::gfc_params();
    gfc.p_set = p_set;
    let net = defaults::network_params();
    let scenario = MarginScenario::default();

    let reports: Vec<_> = FeedbackMode::BOTH
        .iter()
        .map(|&mode| {
            margin_report(&gfc, &net, defaults::F_NOMINAL_HZ, mode, &scenario)
                .expect("margin computation")
        })
        .collect();
    print!("{}", margins_table(&reports));
}
