#!/usr/bin/env python3
"""Setup script for fieldcover package."""

from setuptools import setup, find_packages

# Keep in sync with pyproject.toml
version = "0.1.0"

setup(
    name="fieldcover",
    version=version,
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    include_package_data=True,
    python_requires=">=3.10",
    entry_points={
        "console_scripts": [
            "fieldcover=fieldcover.cli.main:main",
        ],
    },
)
