#![no_main]
use libfuzzer_sys::fuzz_target;

use helm_bem_core::spectral::BieConfig;
use helm_bem_core::DomainGraph;

fuzz_target!(|data: &str| {
    let g = DomainGraph::from_pairs(&[1.0, 2.0, 3.0], &[(1, 2), (3, 2)], 5.0).unwrap();
    let Ok(cfg) = BieConfig::from_notation(data, &g) else { return };
    let printed = cfg.to_notation(&g).expect("parsed config prints");
    assert_eq!(BieConfig::from_notation(&printed, &g).unwrap(), cfg);
});
