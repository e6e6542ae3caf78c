#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(grid) = gl2moments::parse::parse_grid(text) {
        assert!(!grid.is_empty() && grid.len() <= gl2moments::parse::MAX_GRID_POINTS);
        assert!(grid.iter().all(|x| x.is_finite()));
        assert!(grid.windows(2).all(|p| p[0] <= p[1]));
    }
});
