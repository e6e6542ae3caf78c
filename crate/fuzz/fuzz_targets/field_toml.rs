#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(field) = gl2moments::fields::parse_field_toml(text) {
        // an accepted field must be internally consistent
        assert!(field.validate().is_ok());
        assert_eq!(field.place_count(), field.r1 + field.r2);
    }
});
