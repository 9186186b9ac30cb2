use std::f32::consts::PI;

use bloch_su2::propagators::DEFAULT_MAGNUS_GRID;
use bloch_su2::*;

#[test]
fn single_precision_pi_pulse() {
    let cfg = DriveConfig32::sin_squared_pulse(PI, 2.0 * PI, DetuningLaw::Constant(0.0)).unwrap();
    let g0 = CoherenceVector32::ground();
    let sol = integrate_reference(&cfg, &g0, 1e-5).unwrap();
    let g = sol.at(2.0 * PI);
    assert!((g.g3 + 1.0).abs() < 1e-4);
    let r = magnus_propagator(&cfg, 2.0 * PI, MagnusOrder::Third, DEFAULT_MAGNUS_GRID).unwrap();
    assert!(r.apply(&g0).max_abs_diff(&g) < 1e-4);
    let rho: DensityMatrix32 = bloch_to_density(&g).unwrap();
    assert!((rho.rho11 - 1.0).abs() < 1e-4);
}

#[test]
fn single_precision_matches_double() {
    let c32 = DriveConfig32::sin_squared_pulse(1.2, 3.0, DetuningLaw::Constant(0.2)).unwrap();
    let c64 = DriveConfig64::sin_squared_pulse(1.2, 3.0, DetuningLaw::Constant(0.2)).unwrap();
    let t32: MagnusTerms32 = magnus_terms(&c32, 3.0, 401).unwrap();
    let t64: MagnusTerms64 = magnus_terms(&c64, 3.0, 401).unwrap();
    for (a, b) in [
        (t32.lambda0, t64.lambda0),
        (t32.lambda1, t64.lambda1),
        (t32.lambda2, t64.lambda2),
    ] {
        assert!((f64::from(a) - b).abs() < 1e-5);
    }
}
