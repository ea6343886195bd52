# rmt/services/__init__.py
