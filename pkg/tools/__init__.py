"""Инструменты прогона: бенчмарк вариантов и замер сложности."""
