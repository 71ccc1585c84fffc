use nsac_core::io::{csv, parse_config, ConfigFile, Tolerances};
use nsac_core::nsac::{extract_interface, init_state, Domain, SimConfig};
use nsac_core::Profile;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sim_config_round_trips(n in 16usize..200, inv_eps in 4.0f64..16.0, alpha in 0.0f64..1.0,
                              cx in 0.3f64..0.7, r in 0.05f64..0.25, t in 0.0f64..1.0) {
        let eps = 1.0 / inv_eps;
        let n = n.max((1.0 / eps).ceil() as usize);
        let cfg = SimConfig::bubble(Domain::default(), n, eps, alpha, [cx, 0.5], r, t);
        let text = serde_json::to_string(&cfg).unwrap();
        let back: SimConfig = parse_config(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        back.check().unwrap();
    }

    #[test]
    fn csv_round_trips(cols in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 5), 1..5)) {
        let names: Vec<String> = (0..cols.len()).map(|k| format!("c{k}")).collect();
        let header: Vec<&str> = names.iter().map(String::as_str).collect();
        let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
        let (h, back) = csv::parse(&csv::render(&header, &refs).unwrap()).unwrap();
        prop_assert_eq!(h, names);
        prop_assert_eq!(back, cols);
    }

    #[test]
    fn any_known_tolerance_can_be_overridden(pick in 0usize..21, value in 1e-12f64..1.0) {
        let defaults = Tolerances::default();
        let key = defaults.0.keys().nth(pick % defaults.0.len()).unwrap().clone();
        let t = defaults.clone().with_overrides(&format!("{{\"{key}\": {value:e}}}")).unwrap();
        prop_assert_eq!(t.get(&key), value);
        prop_assert_eq!(t.0.len(), defaults.0.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// The zero level set of the initial profile is found at the prescribed
    /// circle, wherever the centre sits relative to the grid.
    #[test]
    fn initial_circle_is_recovered(cx in 0.4f64..0.6, cy in 0.4f64..0.6, r in 0.15f64..0.3) {
        let cfg = SimConfig::bubble(Domain::default(), 64, 1.0 / 16.0, 0.5, [cx, cy], r, 0.0);
        let s = init_state(&cfg, &Profile::quartic()).unwrap();
        let fit = extract_interface(&s.c, &s.grid).unwrap().circle.unwrap();
        let h = s.grid.h;
        prop_assert!((fit.radius - r).abs() < 0.1 * h, "{} vs {r}", fit.radius);
        prop_assert!((fit.center[0] - cx).hypot(fit.center[1] - cy) < 0.1 * h);
    }
}
