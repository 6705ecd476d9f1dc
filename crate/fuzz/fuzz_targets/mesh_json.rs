#![no_main]
use libfuzzer_sys::fuzz_target;

use helm_bem_core::TriangleMesh;

fuzz_target!(|data: &str| {
    if let Ok(mesh) = TriangleMesh::from_json_str(data) {
        let _ = mesh.elements();
        // Printing may nudge a near-degenerate triangle over the edge, so a
        // failed reparse is tolerated; a changed one is not.
        if let Ok(again) = TriangleMesh::from_json_str(&mesh.to_json_string()) {
            assert_eq!(again.len(), mesh.len());
            assert_eq!(again.triangles, mesh.triangles);
        }
    }
});
