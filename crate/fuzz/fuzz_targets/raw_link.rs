#![no_main]

use cone_index::MinimalLink;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(link) = MinimalLink::from_json(data, "raw:fuzz") {
        assert!(link.volume > 0.0 && link.volume.is_finite());
        assert!(link.shape_norm_sq >= 0.0);
        let spec = link.jacobi_spectrum(1).expect("at least one level");
        assert!(spec.levels[0].eigenvalue.is_finite());
        let _ = link.stability_margin();
    }
});
