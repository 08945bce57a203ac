"""Python bindings for the lithomap mineral-mapping library.

Pixel matrices are numpy arrays shaped (n_pixels, n_bands); cubes are
(rows, cols, bands) float32 arrays in pixel-interleaved order.
"""

from ._lithomap import (
    LithomapError,
    elbow_select,
    fisher_direction,
    generate_scene,
    grid_search_alpha,
    kmeans,
    pearson_correlation,
    read_envi,
    read_raster,
    relative_availability,
    run_map,
    similarity_row,
    solve_alpha,
    spectral_angle,
    toa_reflectance,
    vca,
    wcss_curve,
    write_envi,
)

__version__ = "0.1.0"

__all__ = [
    "LithomapError",
    "elbow_select",
    "fisher_direction",
    "generate_scene",
    "grid_search_alpha",
    "kmeans",
    "pearson_correlation",
    "read_envi",
    "read_raster",
    "relative_availability",
    "run_map",
    "similarity_row",
    "solve_alpha",
    "spectral_angle",
    "toa_reflectance",
    "vca",
    "wcss_curve",
    "write_envi",
]
