# Filtrations Module
