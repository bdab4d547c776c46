"""Truncated Laurent series and the generating series built from invariant tables."""
from dtwall.series.laurent import (
    DEFAULT_SCALES,
    LaurentSeries,
    SeriesWindow,
    align,
    drop_variable,
    embed,
    product_window,
    series_add,
    series_inverse,
    series_mul,
    series_pow,
    substitute_monomial,
)
from dtwall.series.generating import (
    assemble_zd6,
    compare_modulo,
    cut_table,
    d4_sign_exponent,
    dtpt_check,
    dz_at,
    euler_transform,
    gottsche,
    in_theorem_range,
    local_d4_series,
    macmahon,
    table_to_series,
    zd6_m1_range,
    zd6_prefactor,
)
from dtwall.series.io import dump_json, dump_text, load_json, load_text
