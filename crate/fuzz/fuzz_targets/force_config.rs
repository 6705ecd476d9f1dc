#![no_main]
use libfuzzer_sys::fuzz_target;

use helm_bem_core::spectral::{check_constraints, BieConfig};
use helm_bem_core::DomainGraph;

const FOUR_BOXES: [(usize, usize); 10] =
    [(1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (3, 4), (4, 5), (5, 2), (5, 3)];

fuzz_target!(|data: &str| {
    let g = DomainGraph::from_pairs(&[1.0, 2.0, 0.5, 8.0, 0.25], &FOUR_BOXES, 1.0).unwrap();
    let Ok(cfg) = BieConfig::parse(data, &g) else { return };
    let _ = check_constraints(&g, &cfg);
    if let Ok(json) = cfg.to_json_string(&g) {
        assert_eq!(BieConfig::from_json_str(&json, &g).unwrap(), cfg);
    }
});
