//! Sweep the three power-angle curves (no limiter, circular limiter,
//! virtual power) for the default study case and print the landmarks.
//!
//! ```bash
//! cargo run --example power_angle_curves [out.csv]
//! ```

use gfc_stability::cli::curve_csv;
use gfc_stability::defaults;
use gfc_stability::electrical::{sweep_curves, CurveEvaluator};
use gfc_stability::types::FeedbackMode;

fn main() {
    let gfc = defaults::gfc_params();
    let net = defaults::network_params();

    let ev = CurveEvaluator::from_params(&gfc, &net);
    let act = ev.activation_angle().expect("limiter never activates");
    println!("limiter activation angle : {:.3} deg", act.to_degrees());

    let (d_unl, p_unl) = {
        let mut g = gfc;
        g.i_lim = 1e9;
        CurveEvaluator::from_params(&g, &net).peak(FeedbackMode::MeasuredPower)
    };
    println!(
        "unlimited curve peak     : {p_unl:.4} pu at {:.2} deg",
        d_unl.to_degrees()
    );

    let (d_lim, p_lim) = ev.peak(FeedbackMode::MeasuredPower);
    println!(
        "limited composite peak   : {p_lim:.4} pu at {:.2} deg",
        d_lim.to_degrees()
    );

    let (d_virt, p_virt) = ev.peak(FeedbackMode::VirtualPower);
    println!(
        "virtual composite peak   : {p_virt:.4} pu at {:.2} deg",
        d_virt.to_degrees()
    );

    println!();
    println!(
        "{:>10} {:>12} {:>12} {:>12}",
        "delta_deg", "unlimited", "limited", "virtual"
    );
    let curve = sweep_curves(&gfc, &net, net.vg_nominal, 13);
    for i in 0..curve.deltas.len() {
        println!(
            "{:>10.1} {:>12.4} {:>12.4} {:>12.4}",
            curve.deltas[i].to_degrees(),
            curve.p_unlimited[i],
            curve.p_limited[i],
            curve.p_virtual[i],
        );
    }

    if let Some(path) = std::env::args().nth(1) {
        let full = sweep_curves(&gfc, &net, net.vg_nominal, 721);
        std::fs::write(&path, curve_csv(&full)).expect("write CSV");
        println!("\n721-point sweep written to {path}");
    }
}
