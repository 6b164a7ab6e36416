//! The trapezoidal discrete realization of the power controller at a
//! 40 us sample period against an RK4 integration of the continuous
//! realization, for a unit power-error step.
//!
//! ```bash
//! cargo run --example discrete_controller
//! ```

use gfc_stability::control::{
    continuous_derivative, derive_gains, trapezoidal_step, ControllerState,
};
use gfc_stability::defaults;

fn main() {
    let omega_b = defaults::omega_base();
    let gains = derive_gains(10.0, 0.05, 0.4, omega_b, 2.0).unwrap();
    println!(
        "gains: k_pp = {:.4}, k_ip = {:.4}, k_gp = {:.4}, k_droop = {:.1}\n",
        gains.k_pp, gains.k_ip, gains.k_gp, gains.k_droop
    );

    let t_s = 40e-6;
    let e = 1.0;
    let mut disc = ControllerState {
        x: 0.0,
        last_error: e,
    };
    let mut cont = ControllerState::new();
    let mut worst = 0.0f64;

    println!(
        "{:>10} {:>14} {:>14} {:>12}",
        "t_ms", "discrete", "continuous", "diff_pu"
    );
    for n in 1..=1000 {
        let (next, out_d) = trapezoidal_step(&disc, &gains, e, t_s);
        disc = next;

        // RK4 step of the continuous single-state realization
        let f = |x: f64| -gains.k_gp * x + (gains.k_ip - gains.k_pp * gains.k_gp) * e;
        let k1 = f(cont.x);
        let k2 = f(cont.x + 0.5 * t_s * k1);
        let k3 = f(cont.x + 0.5 * t_s * k2);
        let k4 = f(cont.x + t_s * k3);
        cont.x += t_s / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let out_c = continuous_derivative(&cont, &gains, e).1;

        worst = worst.max((out_d - out_c).abs() / omega_b);
        if n % 200 == 0 {
            println!(
                "{:>10.2} {:>14.8} {:>14.8} {:>12.2e}",
                n as f64 * t_s * 1e3,
                out_d,
                out_c,
                (out_d - out_c) / omega_b
            );
        }
    }
    println!("\nmax deviation over 1000 steps: {worst:.2e} pu of frequency");
}
