#![no_main]
use libfuzzer_sys::fuzz_target;

use helm_bem_core::problem::SceneFile;

fuzz_target!(|data: &str| {
    let Ok(scene) = SceneFile::from_json_str(data) else { return };
    // Validation must report errors, not panic.
    let _ = scene.graph();
    let _ = scene.mesh_sources();
    let _ = scene.direction();
    let again = SceneFile::from_json_str(&scene.to_json_string()).expect("printed scene reparses");
    assert_eq!(again.to_json_string(), scene.to_json_string());
});
