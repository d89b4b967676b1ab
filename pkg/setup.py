from setuptools import find_packages, setup

setup(
    name='twinterf',
    packages=find_packages('src'),
    package_dir={'': 'src'},
    version='0.1.0',
    description='Two-particle interference (HOM, extended HOM, HBT) from one n-port engine',
    license='MIT',
    python_requires='>=3.9',
    install_requires=[
        'numpy',
        'scipy>=1.6',
        'pandas>=1.5',
        'PyYAML',
        'click>=8.1',
        'python-dotenv',
        'tqdm',
        'pydantic>=2',
    ],
    entry_points={
        'console_scripts': [
            'twinterf = twinterf.cli:main',
        ]
    },
)
