from setuptools import setup, find_packages

setup(
    name="nonlocal-evolve",
    version="1.0.0",
    description="Exponentially convergent Sinc-quadrature solver for parabolic problems with nonlocal initial conditions",
    author="nonlocal-evolve developers",
    packages=find_packages(exclude=["tests"]),
    py_modules=["app"],
    install_requires=[
        "python-dotenv==1.0.0",
        "jsonschema==4.20.0",
        "numpy==1.26.4",
        "pandas==2.1.0",
        "pyyaml==6.0.1",
        "scipy==1.11.4",
        "click==8.1.7",
        "colorama==0.4.6",
    ],
    extras_require={
        "test": ["mpmath==1.3.0"],
    },
    entry_points={
        "console_scripts": [
            "nonlocal-evolve=app:main",
        ],
    },
    python_requires=">=3.9",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
