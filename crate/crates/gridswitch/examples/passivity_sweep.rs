//! Frequency-sweep passivity checks for the built-in supply models, next
//! to the closed-form gain conditions where one exists. The lag-filtered
//! integral controller is passive exactly when K tau_beta < D + K_tilde,
//! and the second-order variant when K (tau_beta + tau_gamma) < D; the
//! sweep should agree on both sides of the boundary.

use gridswitch::supply::{
    check_passivity, default_freq_grid, gain_condition, GovernorParams, SupplyModel,
};

fn report(label: &str, model: &SupplyModel, grid: &[f64]) {
    let cert = check_passivity(model, 1e-3, grid).expect("sweep");
    let analytic = gain_condition(model)
        .map(|ok| if ok { "holds" } else { "violated" })
        .unwrap_or("n/a");
    println!(
        "{label:<28} min Re = {:+.4}  sweep: {}  gain condition: {analytic}",
        cert.min_real_part,
        if cert.verdict { "pass" } else { "fail" },
    );
}

fn main() {
    let grid = default_freq_grid();

    report(
        "pi_lag (passive)",
        &SupplyModel::PiLag {
            k: 1.5,
            k_tilde: 0.3,
            d: 0.5,
            tau_beta: 0.2,
        },
        &grid,
    );
    // K tau_beta = 0.8 exceeds D + K_tilde = 0.6: loses passivity
    report(
        "pi_lag (too aggressive)",
        &SupplyModel::PiLag {
            k: 4.0,
            k_tilde: 0.1,
            d: 0.5,
            tau_beta: 0.2,
        },
        &grid,
    );
    report(
        "pi_second_order (passive)",
        &SupplyModel::PiSecondOrder {
            k: 1.0,
            d: 0.5,
            tau_beta: 0.2,
            tau_gamma: 0.1,
        },
        &grid,
    );
    report(
        "pi_second_order (violated)",
        &SupplyModel::PiSecondOrder {
            k: 2.0,
            d: 0.5,
            tau_beta: 0.2,
            tau_gamma: 0.1,
        },
        &grid,
    );
    report(
        "turbine governor",
        &SupplyModel::governor(&GovernorParams::default()),
        &grid,
    );
}
