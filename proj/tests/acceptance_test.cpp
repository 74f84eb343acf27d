#include <gtest/gtest.h>
#include "odcmd/experiment.hpp"
