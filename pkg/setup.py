from setuptools import setup, find_packages

setup(
    name="helmholtz_mixed_fem",
    version="0.1.0",
    package_dir={"": "src"},
    packages=find_packages(where="src"),
    package_data={"helmholtz_mixed_fem.config": ["defaults.json"]},
    install_requires=[
        'numpy',
        'scipy',
        'pandas',
        'click',
    ],
    entry_points={
        "console_scripts": [
            "helmholtz-fem=helmholtz_mixed_fem.cli.main:cli",
        ],
    },
    description="Adaptive mixed finite elements for the 2D Poisson problem via the discrete Helmholtz decomposition",
    long_description=open('README.md').read(),
    long_description_content_type="text/markdown",
    classifiers=[
        "Programming Language :: Python :: 3",
        "Operating System :: OS Independent",
    ],
    python_requires='>=3.8',
)
