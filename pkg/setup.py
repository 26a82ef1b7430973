import re

from setuptools import find_packages, setup


# Ensure we match the version set in invkit/version.py
try:
    filepath = "invkit/version.py"
    with open(filepath) as version_file:
        (__version__,) = re.findall('__version__ = "(.*)"', version_file.read())
except Exception as error:
    assert False, "Error: Could not open '%s' due %s\n" % (filepath, error)

INSTALL_REQUIRE = [
    "numpy>=1.21",
    "sympy>=1.9",
    "tqdm",
]

TESTS_REQUIRE = ["pytest", "parameterized", "hypothesis", "jsonschema"]

QUALITY_REQUIRE = ["black~=23.1", "ruff>=0.0.241"]

EXTRA_REQUIRE = {
    "testing": [
        "hypothesis",
        "jsonschema",
        "parameterized",
        "pytest",
        "pytest-xdist",
    ],
    "quality": QUALITY_REQUIRE,
}

setup(
    name="invkit",
    version=__version__,
    description="Exact computer algebra for invariants of tuples of matrices under GL(n) and O(n) conjugation: "
    "evaluation, expansion, separating sets, witness pairs and decomposability certificates.",
    long_description=open("README.md", "r", encoding="utf-8").read(),
    long_description_content_type="text/markdown",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "License :: OSI Approved :: Apache Software License",
        "Intended Audience :: Education",
        "Intended Audience :: Science/Research",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    keywords="invariant theory, separating invariants, matrix invariants, computer algebra, finite fields",
    license="Apache",
    packages=find_packages(include=["invkit", "invkit.*"]),
    package_data={"invkit": ["data/*.json", "data/witnesses/*.json"]},
    install_requires=INSTALL_REQUIRE,
    tests_require=TESTS_REQUIRE,
    extras_require=EXTRA_REQUIRE,
    python_requires=">=3.8",
    include_package_data=True,
    zip_safe=False,
    entry_points={"console_scripts": ["invkit-cli=invkit.commands.invkit_cli:main"]},
)
