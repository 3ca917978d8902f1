#include "sparsevi/parallel.hpp"
