#[test]
fn header_declares_the_api() {
    let header = include_str!("../include/pfas_ffi.h");
    for decl in [
        "typedef struct PfasCatalog PfasCatalog;",
        "typedef struct PfasStack PfasStack;",
        "PFAS_STATUS_OK = 0",
        "PFAS_STATUS_INTERNAL = 99",
        "const char *pfas_last_error_message(void);",
        "pfas_catalog_new(",
        "pfas_catalog_free(",
        "pfas_catalog_register_json(",
        "pfas_lookup_process(",
        "pfas_stack_from_preset(",
        "pfas_stack_from_json(",
        "pfas_stack_free(",
        "pfas_stack_metrics(",
        "pfas_chip_pfas(",
        "pfas_analyze_json(",
        "pfas_string_free(",
    ] {
        assert!(header.contains(decl), "missing {decl}");
    }
}
