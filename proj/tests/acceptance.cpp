#include "lpl/experiment.hpp"
#include "lpl/config.hpp"
#include "lpl/validate.hpp"
int main(){return 0;}
