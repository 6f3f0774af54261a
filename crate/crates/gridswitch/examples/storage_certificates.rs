//! Synthesize quadratic storage functions certifying that each supply
//! model dissipates against the frequency port, then spot-check the
//! dissipation inequality on random states.

use gridswitch::storage::{derive_storage, verify_dissipation_samples};
use gridswitch::supply::{GovernorParams, SupplyModel};

fn certify(label: &str, model: &SupplyModel, epsilon: f64) {
    match derive_storage(model, epsilon) {
        Ok(storage) => {
            println!("{label}: storage found (epsilon = {epsilon})");
            if storage.p.nrows() > 0 {
                println!("  P = {:.5}", storage.p);
                let ss = model.to_state_space().expect("realizable");
                verify_dissipation_samples(&ss, &storage.p, epsilon, 1e-8)
                    .expect("sampled dissipation inequality");
                println!("  sampled dissipation inequality verified");
            } else {
                println!("  stateless model, storage is identically zero");
            }
        }
        Err(e) => println!("{label}: no certificate ({e})"),
    }
}

fn main() {
    certify(
        "static damping",
        &SupplyModel::StaticDamping { d: 0.5 },
        1e-3,
    );
    certify(
        "pi_lag",
        &SupplyModel::PiLag {
            k: 1.5,
            k_tilde: 0.3,
            d: 0.5,
            tau_beta: 0.2,
        },
        1e-3,
    );
    certify(
        "pi_second_order",
        &SupplyModel::PiSecondOrder {
            k: 1.0,
            d: 0.5,
            tau_beta: 0.2,
            tau_gamma: 0.1,
        },
        1e-3,
    );
    certify(
        "turbine governor",
        &SupplyModel::governor(&GovernorParams::default()),
        1e-3,
    );
    // K tau_beta = 0.8 > D + K_tilde = 0.6: correctly refused
    certify(
        "pi_lag (non-passive)",
        &SupplyModel::PiLag {
            k: 4.0,
            k_tilde: 0.1,
            d: 0.5,
            tau_beta: 0.2,
        },
        1e-3,
    );
}
