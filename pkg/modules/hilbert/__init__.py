# Hilbert Module
