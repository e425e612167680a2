# File: setup.py
# Date: 3-Oct-2026
#
# Update:
#   14-Oct-2026  console script entry point for dft-toy
#
import re

from setuptools import find_packages
from setuptools import setup

packages = []
thisPackage = "deepsup.dft"

with open("deepsup/dft/__init__.py", "r") as fd:
    version = re.search(r'^__version__\s*=\s*[\'"]([^\'"]*)[\'"]', fd.read(), re.MULTILINE).group(1)

if not version:
    raise RuntimeError("Cannot find version information")

setup(
    name=thisPackage,
    version=version,
    description="Deep supervision fine-tuning of a toy multilingual transformer",
    long_description="See:  README.md",
    author="DFT toy developers",
    license="Apache 2.0",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Natural Language :: English",
        "License :: OSI Approved :: Apache Software License",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
    ],
    #
    python_requires=">=3.9",
    install_requires=["numpy >= 1.22", "matplotlib >= 3.5", "wrapt", "click >= 8.0"],
    packages=find_packages(exclude=["deepsup.dft.tests-dft", "tests.*"]),
    package_data={
        # If any package contains *.md or *.rst ...  files, include them:
        "": ["*.md", "*.rst", "*.txt", "*.cfg"],
    },
    entry_points={"console_scripts": ["dft-toy=deepsup.dft.evalcli.DftCli:main"]},
    #
    test_suite="deepsup.dft.tests-dft",
    tests_require=["tox", "pytest"],
    #
    extras_require={"dev": ["check-manifest"], "test": ["coverage", "pytest"]},
    command_options={"build_sphinx": {"project": ("setup.py", thisPackage), "version": ("setup.py", version), "release": ("setup.py", version)}},
    # This setting for namespace package support -
    zip_safe=False,
)
