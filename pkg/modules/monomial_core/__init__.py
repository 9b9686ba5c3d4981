# Monomial Core Module
