"""Setup.py script for the ARMI photoacoustic tomography plugin"""

from setuptools import setup, find_namespace_packages

with open("README.md") as f:
    README = f.read()

setup(
    name="armicontrib-photoacoustic",
    version="1.0.0",
    description=(
        "ARMI plugin for simulating and reconstructing circular photoacoustic measurements."
    ),
    author="TerraPower LLC",
    author_email="armi-devs@terrapower.com",
    packages=find_namespace_packages(include=["armicontrib.*", "patdemo", "patdemo.*"]),
    package_data={
        "armicontrib.photoacoustic": ["templates/*"],
    },
    entry_points={"console_scripts": ["patdemo=patdemo:main"]},
    long_description=README,
    install_requires=[
        "armi",
        "jinja2",
        "numpy",
        "scipy",
        "tabulate",
        "voluptuous",
    ],
    extras_require={
        "dev": [
            "pytest",
            "sphinx",
            "sphinx_rtd_theme",
            "sphinxcontrib-apidoc",
        ]
    },
    keywords=["ARMI", "Photoacoustic tomography", "Inverse problems"],
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    test_suite="tests",
    include_package_data=True,
)
