//! The circular current limiter and its equivalent internal impedance:
//! sweep the rotor angle, watch the unsaturated reference grow past the
//! limit, and check that scaling the virtual impedance by kc_lim
//! reproduces the saturated operating point.
//!
//! ```bash
//! cargo run --example current_limiter
//! ```

use gfc_stability::defaults;
use gfc_stability::electrical::{apply_current_limit, internal_impedance, CurveEvaluator};
use gfc_stability::types::DqVector;

fn main() {
    let gfc = defaults::gfc_params();
    let net = defaults::network_params();
    let ev = CurveEvaluator::from_params(&gfc, &net);

    println!(
        "{:>10} {:>10} {:>10} {:>8} {:>8} {:>10} {:>10}",
        "delta_deg", "i_unsat", "i_actual", "kc_lim", "x_in", "p_pcc", "p_virt"
    );
    for deg in (0..=180).step_by(15) {
        let op = ev.operating_point((deg as f64).to_radians());
        let (_, x_in) = internal_impedance(op.kc_lim, gfc.r_v, gfc.x_v);
        println!(
            "{:>10} {:>10.4} {:>10.4} {:>8.3} {:>8.3} {:>10.4} {:>10.4}",
            deg, op.i_mag_unsat, op.i_mag_actual, op.kc_lim, x_in, op.p_pcc, op.p_virt
        );
    }

    // the dq-level limiter preserves the current angle exactly
    let i_ref = DqVector::new(1.8, -1.2);
    let (i_sat, kc) = apply_current_limit(i_ref, gfc.i_lim);
    println!(
        "\ndq limiter: |{:.2}, {:.2}| = {:.3} -> |{:.3}, {:.3}| = {:.3} (kc_lim = {:.3})",
        i_ref.d,
        i_ref.q,
        i_ref.magnitude(),
        i_sat.d,
        i_sat.q,
        i_sat.magnitude(),
        kc
    );
    println!(
        "angle preserved: {:.6} deg vs {:.6} deg",
        i_ref.q.atan2(i_ref.d).to_degrees(),
        i_sat.q.atan2(i_sat.d).to_degrees()
    );
}
