//! Equal-area criterion for the voltage-dip case: accelerating area under
//! the fault-on curve against the decelerating area under the post-fault
//! curve, swept over clearing angles up to the unstable equilibrium.
//!
//! ```bash
//! cargo run --example equal_area
//! ```

use gfc_stability::analysis::equal_area;
use gfc_stability::defaults;
use gfc_stability::electrical::CurveEvaluator;
use gfc_stability::types::FeedbackMode;

fn main() {
    let mut gfc = defaults::gfc_params();
    gfc.p_set = 0.8;
    let net = defaults::network_params();
    let mode = FeedbackMode::MeasuredPower;

    let pre = CurveEvaluator::from_params(&gfc, &net);
    let fault = CurveEvaluator::with_vg(&gfc, &net, 0.5);
    let d0 = pre.rising_crossing(mode, gfc.p_set).unwrap();
    let du = pre.falling_crossing(mode, gfc.p_set).unwrap();
    println!("stable equilibrium   : {:.3} deg", d0.to_degrees());
    println!("unstable equilibrium : {:.3} deg\n", du.to_degrees());

    println!(
        "{:>14} {:>12} {:>12} {:>10}",
        "clearing_deg", "accel_area", "decel_area", "verdict"
    );
    let mut critical = None;
    for i in 0..=12 {
        let clearing = d0 + (du - d0) * i as f64 / 12.0;
        let eac = equal_area(gfc.p_set, &pre, &fault, &pre, mode, clearing).unwrap();
        println!(
            "{:>14.2} {:>12.4} {:>12.4} {:>10}",
            clearing.to_degrees(),
            eac.accelerating,
            eac.decelerating,
            if eac.stable { "stable" } else { "unstable" }
        );
        if eac.stable {
            critical = Some(clearing);
        }
    }

    // refine the critical clearing angle
    let (mut lo, mut hi) = (critical.unwrap_or(d0), du);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if equal_area(gfc.p_set, &pre, &fault, &pre, mode, mid)
            .unwrap()
            .stable
        {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    println!(
        "\ncritical clearing angle (equal areas): {:.3} deg",
        lo.to_degrees()
    );
}
