"""
Robust Online Optimizer
=======================

Онлайн-оптимизация в неизвестной стохастической среде: обучение модели
по скользящему окну, множество неопределённости Вассерштейна,
ускоренный проекционный градиент и диагностика regret.

Модули:
- core: Конфигурация и инфраструктура
- learning: Обучение α и множества неопределённости
- smoothing: Сглаживание Моро
- objectives: Целевые функции задач 1 и 2
- solver: Ускоренный проекционный градиент
- diagnostics: Оценки regret
- scenarios: Симуляторы среды
- simulation: Замкнутый цикл, отчёты, репликации
"""

__version__ = "1.0.0"
