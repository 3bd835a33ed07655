//! Harness-level invariants: local constancy of the active signature on
//! identifiable directions, the box vertex census, and distance shrinkage
//! of the continuity probe.

use std::collections::BTreeSet;

use tame_opt_core::body::{fixture, FixtureId};
use tame_opt_core::harness::{diagnose, survey, DiagnoseOptions, Overall};
use tame_opt_core::identify::{check_partial_smoothness, extract_manifold, ProbeOptions};
use tame_opt_core::numerics::scaled;
use tame_opt_core::solver::{maximize_linear, SolverOptions};

#[test]
fn identifiable_signatures_are_locally_constant() {
    // Re-running the pipeline at 1.001·c keeps the active signature for
    // identifiable hits: the maximizer is scale-invariant and the verdict
    // machinery is scale-aware.
    let mut opts = DiagnoseOptions::default();
    opts.decay_count = 120;
    for id in FixtureId::ALL {
        let body = fixture(id);
        let stats = survey(&body, 80, 0x10ca1, &opts);
        let mut checked = 0;
        for rec in &stats.samples {
            if rec.verdict != Overall::Identifiable || checked >= 50 {
                continue;
            }
            checked += 1;
            let rep = diagnose(&body, &scaled(&rec.c, 1.001), &opts);
            assert_eq!(
                rep.signature(),
                rec.signature,
                "{id:?} sample {}: signature changed under 1.001 scaling",
                rec.index
            );
        }
        assert!(checked >= 50, "{id:?}: only {checked} identifiable hits");
    }
}

#[test]
fn box_census_is_its_eight_vertices() {
    let body = fixture(FixtureId::Box);
    let mut opts = DiagnoseOptions::default();
    opts.decay_count = 100;
    let stats = survey(&body, 2000, 0xce5905, &opts);
    // Generic directions pick vertices: three facets active, ball inactive.
    let signatures: BTreeSet<String> = stats.census.keys().cloned().collect();
    assert_eq!(signatures.len(), 8, "census signatures: {:?}", stats.census);
    for sig in &signatures {
        assert_eq!(sig.split('+').count(), 3, "non-vertex signature {sig}");
    }
}

#[test]
fn probe_distances_shrink_with_radius() {
    // d(1e−3) ≤ 0.6·d(1e−2) + 1e−9 on the smooth fixtures.
    let opts = SolverOptions::default();
    for (id, c) in [
        (FixtureId::Ridge, [0.0, 0.0, -1.0]),
        (FixtureId::Ball, [0.4, -0.3, 0.86]),
    ] {
        let body = fixture(id);
        let r = maximize_linear(&body, &c, &opts).unwrap();
        let m = extract_manifold(&body, &r).unwrap();
        let v = check_partial_smoothness(&body, &m, &ProbeOptions::default()).unwrap();
        for probe_pair in v.details.probes.chunks(2) {
            if let [large, small] = probe_pair {
                let (Some(dl), Some(ds)) = (large.distance, small.distance) else {
                    continue;
                };
                assert!(
                    ds <= 0.6 * dl + 1e-9,
                    "{id:?} direction {:?}: d({}) = {ds} vs d({}) = {dl}",
                    large.direction,
                    small.radius,
                    large.radius
                );
            }
        }
    }
}
