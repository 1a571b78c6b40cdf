import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="kinquant",
    version="0.1.0",
    description="Nonlinear Fokker-Planck and Schroedinger solvers for kinetic generalized entropies.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["tests", "tests.*"]),
    install_requires=[
        "numpy",
        "scipy",
        "pandas>=1.5",
        "matplotlib",
        "seaborn",
        "ipywidgets",
        "ipython",
    ],
    extras_require={"test": ["pytest"]},
    entry_points={"console_scripts": ["kinquant=kinquant.cli_runner:main"]},
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.8",
)
