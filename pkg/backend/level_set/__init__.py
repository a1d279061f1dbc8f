from .marching_squares import LevelSetPolyline, trace_contours, extract_level_set
