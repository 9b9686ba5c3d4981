# Theorems Module
