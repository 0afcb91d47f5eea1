# Geometry kernels
