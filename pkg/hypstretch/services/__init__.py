# Surfaces, candidates, stretching, verification and rendering
