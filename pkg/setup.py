#!/usr/bin/env python3
"""
mlaudit setup script
Installs the package and the `mlaudit` console command
"""

from pathlib import Path

from setuptools import find_packages, setup

from src import __version__

ROOT = Path(__file__).resolve().parent
RUNTIME = ('click', 'numpy', 'pandas', 'pydantic', 'python-dateutil')


def read_requirements():
    """Runtime dependency names from requirements.txt (exact pins stay in the lock file); test tooling stays out of install_requires"""
    pins = [line.strip() for line in (ROOT / 'requirements.txt').read_text(encoding='utf-8').splitlines()]
    return [pin.split('==')[0] for pin in pins if pin and pin.split('==')[0] in RUNTIME]


setup(
    name='mlaudit',
    version=__version__,
    description='Audit toolkit for certifying supervised machine-learning applications',
    long_description=(ROOT / 'README.md').read_text(encoding='utf-8'),
    long_description_content_type='text/markdown',
    packages=find_packages(include=['src', 'src.*']),
    package_data={'src': ['data/*.json']},
    python_requires='>=3.10',
    install_requires=read_requirements(),
    extras_require={'test': ['pytest', 'hypothesis']},
    entry_points={'console_scripts': ['mlaudit=src.main:cli_main']},
)
